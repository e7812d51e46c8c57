use std::process::{Command, Output};

use serde_json::Value;

fn cdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdl")).args(args).env_remove("CDL_SEED").output().expect("run cdl")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn enumerate_reports_thirty_at_t4() {
    let v = json(&cdl(&["enumerate", "--t", "4"]));
    assert_eq!(v["result"]["count"], 30);
    assert_eq!(v["result"]["elements"].as_array().unwrap().len(), 30);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["tool"], "cdl");
    assert_eq!(v["config"]["command"], "enumerate");
    assert_eq!(v["config"]["args"]["t"], 4);
}

#[test]
fn converge_vanishes_at_t3() {
    let v = json(&cdl(&["converge", "--t", "3", "--n", "4", "--gate", "T", "--k-max", "5"]));
    let norms = v["result"]["norms"].as_array().expect("norms");
    assert_eq!(norms.len(), 6);
    assert!(norms.iter().all(|x| x.as_f64().unwrap() == 0.0));
}

#[test]
fn unknown_flag_exits_with_argument_code() {
    let out = cdl(&["enumerate", "--t", "4", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_values_exit_with_argument_code() {
    let out = cdl(&["converge", "--t", "4", "--n", "3", "--gate", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).expect("structured error");
    assert_eq!(err["error"]["kind"], "argument");
}

#[test]
fn oversized_problems_exit_with_resource_code() {
    let out = cdl(&["gap", "--t", "4", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).expect("structured error");
    assert_eq!(err["error"]["kind"], "resource");
    assert_eq!(err["error"]["exit_code"], 3);
}

#[test]
fn singular_gram_exits_with_conditioning_code() {
    // n < t − 1: the tensor powers are linearly dependent
    let out = cdl(&["gram", "--t", "4", "--n", "1", "--bounds"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn equal_seeds_give_identical_bytes() {
    let args = [
        "frame-potential",
        "--t",
        "2",
        "--n",
        "2",
        "--family",
        "clifford",
        "--samples",
        "400",
        "--block-size",
        "40",
        "--seed",
        "9",
    ];
    let a = cdl(&args);
    let b = cdl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let single = cdl(&[&args[..], &["--threads", "1"]].concat());
    let va = json(&a);
    let vs = json(&single);
    assert_eq!(va["result"], vs["result"]);
}

#[test]
fn seed_falls_back_to_environment() {
    let args = ["sample-clifford", "--n", "3", "--count", "2"];
    let from_env = Command::new(env!("CARGO_BIN_EXE_cdl")).args(args).env("CDL_SEED", "42").output().unwrap();
    let from_flag = cdl(&[&args[..], &["--seed", "42"]].concat());
    let other = cdl(&[&args[..], &["--seed", "43"]].concat());
    let (e, f, o) = (json(&from_env), json(&from_flag), json(&other));
    assert_eq!(e["result"], f["result"]);
    assert_ne!(e["result"], o["result"]);
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let out = cdl(&["haar-overlap", "--t", "6", "--anti-identity"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!((v["result"]["haar_overlap"].as_f64().unwrap() - 4.0 / 7.0).abs() < 1e-10);
    for token in text.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']') {
        if token.contains('e') && token.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') {
            let mantissa = token.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "{token}");
        }
    }
}

#[test]
fn csv_output_has_config_preamble() {
    let out = cdl(&["converge", "--t", "4", "--n", "8", "--k-max", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# cdl"));
    assert!(lines[1].starts_with("# config"));
    assert!(lines[2].starts_with("k,norm"));
    assert_eq!(lines.len(), 3 + 4);
}

#[test]
fn tableau_json_prints_pauli_strings() {
    let v = json(&cdl(&["sample-clifford", "--n", "2", "--count", "3", "--seed", "1", "--format", "tableau-json"]));
    let tabs = v["result"]["tableaux"].as_array().unwrap();
    assert_eq!(tabs.len(), 3);
    for tab in tabs {
        for key in ["x_images", "z_images"] {
            for p in tab[key].as_array().unwrap() {
                let s = p.as_str().unwrap();
                assert!(s.starts_with('+') || s.starts_with('-'));
                assert_eq!(s.len(), 3);
            }
        }
    }
    let out = cdl(&["enumerate", "--t", "2", "--format", "tableau-json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn explain_needs_no_other_arguments() {
    let out = cdl(&["gap", "--explain"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("H_{n,t}"));
}

#[test]
fn output_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("cdl-test-{}.json", std::process::id()));
    let out = cdl(&["hamming", "--t", "6", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["config"]["command"], "hamming");
}
