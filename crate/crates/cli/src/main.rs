mod commands;
mod explain;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cdl::Error;

#[derive(Parser, Debug)]
#[command(
    name = "cdl",
    version,
    about = "Clifford commutant algebra, moment-operator convergence and stabilizer oracles"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for sampling (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Describe what the subcommand computes and exit.
    #[arg(long, global = true)]
    explain: bool,

    #[command(subcommand)]
    command: commands::Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    /// JSON with tableaux as Pauli strings (sample-clifford only).
    #[value(name = "tableau-json")]
    #[serde(rename = "tableau-json")]
    TableauJson,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::Dimension { .. } | Error::Argument(_) => (2, "argument"),
            Error::Resource(_) => (3, "resource"),
            Error::Conditioning(_) => (4, "conditioning"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

impl Failure {
    fn argument(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "argument", message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, kind: "io", message: message.into() }
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    let body = json!({"error": {"kind": f.kind, "message": f.message, "exit_code": f.code}});
    eprint!("{}", output::to_json(&body));
    ExitCode::from(f.code)
}

/// `--explain` is answered before full parsing so that required arguments
/// can be omitted.
fn explain_early(args: &[String]) -> Option<ExitCode> {
    if !args.iter().any(|a| a == "--explain") {
        return None;
    }
    let sub = args.iter().skip(1).find(|a| !a.starts_with('-') && commands::NAMES.contains(&a.as_str()));
    match sub {
        Some(name) => {
            println!("{}", explain::text(name));
            Some(ExitCode::SUCCESS)
        }
        None => {
            println!("{}", explain::overview());
            Some(ExitCode::SUCCESS)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::argument("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::argument(format!("cannot configure thread pool: {e}")))?;
    }
    if cli.format == Format::TableauJson && !matches!(cli.command, commands::Command::SampleClifford(_)) {
        return Err(Failure::argument("--format tableau-json applies to sample-clifford only"));
    }
    let seed_env = std::env::var("CDL_SEED").ok();
    let resolved = cli.command.resolve(seed_env.as_deref()).map_err(Failure::argument)?;
    let report = commands::dispatch(&resolved)?;
    let config = json!({
        "command": resolved.name(),
        "args": resolved.args_json(),
        "format": cli.format,
        "threads": cli.threads,
    });
    let text = match cli.format {
        Format::Json | Format::TableauJson => {
            let mut envelope = serde_json::Map::new();
            envelope.insert("schema_version".into(), json!(output::SCHEMA_VERSION));
            envelope.insert("tool".into(), json!("cdl"));
            envelope.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            envelope.insert("config".into(), config);
            envelope.insert("result".into(), report.result);
            output::to_json(&Value::Object(envelope))
        }
        Format::Csv => {
            let preamble = vec![
                format!("cdl {} schema {}", env!("CARGO_PKG_VERSION"), output::SCHEMA_VERSION),
                format!("config {config}"),
            ];
            output::to_csv(&report.table, &preamble).map_err(|e| Failure::io(e.to_string()))?
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if let Some(code) = explain_early(&args) {
        return code;
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            // clap uses 0 for --help/--version and 2 for usage errors
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(&f),
    }
}
