use clap::{Args, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use cdl::commutant::{gram, gram_schmidt_cofactors};
use cdl::gf2::BitVec;
use cdl::hamming::{defect_shift_prob, pair_prob, preserve_prob, to_f64, WeightReport};
use cdl::lagrangian::{all_ones_defect, anti_identity, sigma, sigma_count, StochasticLagrangian};
use cdl::moments::{depth_bound_log2, eta, haar_interleaved_depth, ChannelKind, GateK, InterleavedModel};
use cdl::operators::haar_overlap;
use cdl::stabilizer::{
    frame_potential_mc, hamiltonian_gap, interleaved_sweep_mc, sample_clifford, Family, FrameEstimate, Pauli,
};
use cdl::Error;

use crate::output::Table;
use crate::Failure;

pub const NAMES: [&str; 10] = [
    "enumerate",
    "gram",
    "haar-overlap",
    "hamming",
    "eta",
    "converge",
    "bound",
    "gap",
    "frame-potential",
    "sample-clifford",
];

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// List the stochastic Lagrangian subspaces Σ_{t,t}.
    Enumerate(EnumerateArgs),
    /// Gram matrix of the commutant basis {Q_T^{⊗n}}.
    Gram(GramArgs),
    /// Haar-symmetrized overlaps ⟨Q_T|P_H|Q_T⟩.
    HaarOverlap(HaarOverlapArgs),
    /// Exact Hamming-weight preservation probabilities.
    Hamming(HammingArgs),
    /// Largest non-unit eigenvalue η of the single-site moment operator.
    Eta(GateArgs),
    /// ‖[(P_Cl − P_H)R(K)]^k‖₂ for k = 0..=k_max.
    Converge(ConvergeArgs),
    /// log₂ of the analytic depth bound.
    Bound(BoundArgs),
    /// Spectral gap of the local-walk Hamiltonian H_{n,t}.
    Gap(GapArgs),
    /// Monte Carlo frame potential ∫∫|tr(U†V)|^{2t}.
    FramePotential(FrameArgs),
    /// Uniformly random Clifford tableaux.
    SampleClifford(SampleArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub t: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GramArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
    /// Include the matrix of log₂ Gram entries.
    #[arg(long)]
    pub matrix: bool,
    /// Also build the Gram–Schmidt basis and check its coefficient bounds.
    #[arg(long)]
    pub bounds: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HaarOverlapArgs {
    #[arg(long)]
    pub t: usize,
    /// Evaluate the anti-identity element instead of enumerating Σ_{t,t}.
    #[arg(long)]
    pub anti_identity: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HammingArgs {
    #[arg(long)]
    pub t: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GateArgs {
    #[arg(long)]
    pub t: usize,
    /// T, sqrtT, S, H, I, phase:<radians>, or eight comma-separated floats
    /// (re, im of the entries in row-major order).
    #[arg(long, default_value = "T")]
    pub gate: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Standard,
    NoIdentity,
    Haar,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "T")]
    pub gate: String,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    /// Single-site channel: ⅓(Ad_K + Ad_K† + id), ½(Ad_K + Ad_K†), or the Haar twirl.
    #[arg(long, value_enum, default_value_t = KindArg::Standard)]
    pub kind: KindArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eta_bar: f64,
    /// Also report the Haar-interleaved depth for this accuracy.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GapArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Haar,
    Clifford,
    Interleaved,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FrameArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value = "T")]
    pub gate: String,
    /// Number of K layers for the interleaved family.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Report every depth 0..=k from shared circuit prefixes.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Samples per block of the pair estimator (capped at samples/2).
    #[arg(long, default_value_t = 2000)]
    pub block_size: usize,
    /// Seed; falls back to CDL_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Seed; falls back to CDL_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn resolve_seed(seed: &mut Option<u64>, env: Option<&str>) -> Result<(), String> {
    if seed.is_none() {
        *seed = Some(match env {
            Some(s) => s.trim().parse().map_err(|_| format!("CDL_SEED is not an unsigned integer: {s:?}"))?,
            None => 0,
        });
    }
    Ok(())
}

impl Command {
    /// Fills in defaults that depend on the environment.
    pub fn resolve(&self, seed_env: Option<&str>) -> Result<Command, String> {
        let mut c = self.clone();
        match &mut c {
            Command::FramePotential(a) => resolve_seed(&mut a.seed, seed_env)?,
            Command::SampleClifford(a) => resolve_seed(&mut a.seed, seed_env)?,
            _ => {}
        }
        Ok(c)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Enumerate(_) => NAMES[0],
            Command::Gram(_) => NAMES[1],
            Command::HaarOverlap(_) => NAMES[2],
            Command::Hamming(_) => NAMES[3],
            Command::Eta(_) => NAMES[4],
            Command::Converge(_) => NAMES[5],
            Command::Bound(_) => NAMES[6],
            Command::Gap(_) => NAMES[7],
            Command::FramePotential(_) => NAMES[8],
            Command::SampleClifford(_) => NAMES[9],
        }
    }

    pub fn args_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}

pub struct Report {
    pub result: Value,
    pub table: Table,
}

pub fn parse_gate(spec: &str) -> Result<GateK, Error> {
    let s = spec.trim();
    if let Some(angle) = s.strip_prefix("phase:") {
        let a: f64 = angle.parse().map_err(|_| Error::Argument(format!("bad phase angle {angle:?}")))?;
        if !a.is_finite() {
            return Err(Error::Argument("phase angle must be finite".into()));
        }
        return Ok(GateK::phase(a, s));
    }
    match s.to_ascii_lowercase().as_str() {
        "t" => Ok(GateK::t_gate()),
        "sqrtt" | "t1/2" => Ok(GateK::sqrt_t()),
        "s" => Ok(GateK::s_gate()),
        "h" => Ok(GateK::hadamard()),
        "i" | "id" | "identity" => Ok(GateK::identity()),
        _ => {
            let v: Vec<f64> = s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::Argument(format!("unknown gate {spec:?}")))?;
            GateK::from_floats(&v)
        }
    }
}

fn factorial(t: usize) -> u64 {
    (1..=t as u64).product()
}

fn subspace_rows(s: &StochasticLagrangian) -> Vec<String> {
    let t = s.t();
    s.space()
        .basis()
        .map(|v: BitVec| {
            let text = v.to_string();
            format!("{}|{}", &text[..t], &text[t..])
        })
        .collect()
}

fn enumerate(a: &EnumerateArgs) -> Result<Report, Error> {
    let spaces = sigma(a.t)?;
    let mut table = Table::new(&["index", "permutation", "left_defect_dim", "right_defect_dim", "basis"]);
    let mut elements = Vec::new();
    for (i, s) in spaces.iter().enumerate() {
        let rows = subspace_rows(s);
        table.push(vec![
            json!(i),
            json!(s.is_permutation()),
            json!(s.left_defect_dim()),
            json!(s.right_defect_dim()),
            json!(rows.join(" ")),
        ]);
        elements.push(json!({
            "index": i,
            "permutation": s.is_permutation(),
            "left_defect_dim": s.left_defect_dim(),
            "right_defect_dim": s.right_defect_dim(),
            "basis": rows,
        }));
    }
    let perms = spaces.iter().filter(|s| s.is_permutation()).count();
    Ok(Report {
        result: json!({
            "t": a.t,
            "count": spaces.len(),
            "expected_count": sigma_count(a.t),
            "permutation_count": perms,
            "factorial": factorial(a.t),
            "elements": elements,
        }),
        table,
    })
}

fn gram_cmd(a: &GramArgs) -> Result<Report, Error> {
    let model = gram(a.t, a.n)?;
    let expected: f64 = (0..a.t.saturating_sub(1)).map(|r| 1.0 + (r as f64 - a.n as f64).exp2()).product();
    let sums = model.row_sums();
    let rel: Vec<f64> = sums.iter().map(|s| (s - expected).abs() / expected).collect();
    let eig = model.eigenvalues();
    let mut table = Table::new(&["index", "row_sum", "relative_error"]);
    for (i, (s, r)) in sums.iter().zip(&rel).enumerate() {
        table.push(vec![json!(i), json!(s), json!(r)]);
    }
    let mut result = json!({
        "t": a.t,
        "n": a.n,
        "size": model.size(),
        "permutation_count": model.perm_count(),
        "rank": model.rank(),
        "min_eigenvalue": eig.iter().copied().fold(f64::INFINITY, f64::min),
        "max_eigenvalue": eig.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "expected_row_sum": expected,
        "max_row_sum_relative_error": rel.iter().copied().fold(0.0, f64::max),
        "exact_row_sum_check": model.exact_row_sum_check(),
        "frame_operator_deviation": model.frame_operator_deviation(),
        "row_sums": sums,
    });
    if a.matrix {
        let m = model.size();
        let rows: Vec<Vec<i32>> = (0..m).map(|i| (0..m).map(|j| model.gram_log2(i, j)).collect()).collect();
        result["gram_log2"] = json!(rows);
    }
    if a.bounds {
        let basis = gram_schmidt_cofactors(&model)?;
        result["gram_schmidt"] = json!({
            "bounds": basis.check_bounds(&model),
            "max_normalized_overlap": basis.max_normalized_overlap(&model),
        });
    }
    Ok(Report { result, table })
}

fn haar_overlap_cmd(a: &HaarOverlapArgs) -> Result<Report, Error> {
    let mut table = Table::new(&["index", "permutation", "haar_overlap", "pair_probability"]);
    if a.anti_identity {
        let s = StochasticLagrangian::from_orthogonal(&anti_identity(a.t)?);
        let v = haar_overlap(&s)?;
        let p = pair_prob(&s)?;
        table.push(vec![json!("anti-identity"), json!(false), json!(v), json!(p.probability_f64())]);
        return Ok(Report {
            result: json!({"t": a.t, "element": "anti-identity", "haar_overlap": v, "pair_probability": p.probability_f64()}),
            table,
        });
    }
    let spaces = sigma(a.t)?;
    let mut elements = Vec::new();
    let mut worst: Option<f64> = None;
    for (i, s) in spaces.iter().enumerate() {
        let v = haar_overlap(s)?;
        let p = pair_prob(s)?.probability_f64();
        if !s.is_permutation() {
            worst = Some(worst.map_or(v, |w: f64| w.max(v)));
        }
        table.push(vec![json!(i), json!(s.is_permutation()), json!(v), json!(p)]);
        elements.push(json!({"index": i, "permutation": s.is_permutation(), "haar_overlap": v, "pair_probability": p}));
    }
    Ok(Report {
        result: json!({"t": a.t, "max_non_permutation_overlap": worst, "bound": 0.875, "elements": elements}),
        table,
    })
}

fn weight_json(r: &WeightReport) -> Value {
    json!({
        "probability": r.probability_f64(),
        "numerator": r.probability.numer(),
        "denominator": r.probability.denom(),
        "bound": r.bound_f64(),
        "bound_column_weight": r.bound_column_weight,
        "saturated": r.saturated,
    })
}

fn hamming_cmd(a: &HammingArgs) -> Result<Report, Error> {
    let t = a.t;
    let mut table = Table::new(&["quantity", "probability", "numerator", "denominator", "bound", "saturated"]);
    let mut result = json!({"t": t});
    let row = |name: &str, r: &WeightReport, table: &mut Table| {
        table.push(vec![
            json!(name),
            json!(r.probability_f64()),
            json!(r.probability.numer()),
            json!(r.probability.denom()),
            json!(r.bound_f64()),
            json!(r.saturated),
        ]);
    };
    if t.is_multiple_of(2) {
        let o = anti_identity(t)?;
        let r = preserve_prob(o.matrix())?;
        row("anti_identity_preserve", &r, &mut table);
        result["anti_identity_preserve"] = weight_json(&r);
    }
    if t.is_multiple_of(4) {
        let n = all_ones_defect(t)?;
        let s = StochasticLagrangian::diagonal_defect(&n)?;
        let r = pair_prob(&s)?;
        row("all_ones_defect_pair", &r, &mut table);
        result["all_ones_defect_pair"] = weight_json(&r);
        let shift = defect_shift_prob(n.space(), &BitVec::ones(t))?;
        table.push(vec![
            json!("all_ones_defect_shift"),
            json!(to_f64(shift)),
            json!(shift.numer()),
            json!(shift.denom()),
            Value::Null,
            Value::Null,
        ]);
        result["all_ones_defect_shift"] =
            json!({"probability": to_f64(shift), "numerator": shift.numer(), "denominator": shift.denom()});
    }
    if t <= 5 {
        let mut worst: Option<f64> = None;
        for s in sigma(t)?.iter().filter(|s| !s.is_permutation()) {
            let p = pair_prob(s)?.probability_f64();
            worst = Some(worst.map_or(p, |w: f64| w.max(p)));
        }
        result["max_non_permutation_pair_probability"] = json!(worst);
    }
    Ok(Report { result, table })
}

fn eta_cmd(a: &GateArgs) -> Result<Report, Error> {
    let gate = parse_gate(&a.gate)?;
    let v = eta(a.t, &gate)?;
    let mut table = Table::new(&["t", "gate", "eta"]);
    table.push(vec![json!(a.t), json!(gate.label()), json!(v)]);
    Ok(Report { result: json!({"t": a.t, "gate": gate.label(), "eta": v}), table })
}

fn converge_cmd(a: &ConvergeArgs) -> Result<Report, Error> {
    let kind = match a.kind {
        KindArg::Standard => ChannelKind::Standard,
        KindArg::NoIdentity => ChannelKind::NoIdentity,
        KindArg::Haar => ChannelKind::Haar,
    };
    let gate = if kind == ChannelKind::Haar { None } else { Some(parse_gate(&a.gate)?) };
    let model = InterleavedModel::new(a.t, a.n, gate.as_ref(), kind)?;
    let norms = model.convergence_norms(a.k_max);
    let ratios: Vec<Option<f64>> = (0..norms.len())
        .map(|k| if k >= 2 && norms[k - 1] > 0.0 { Some(norms[k] / norms[k - 1]) } else { None })
        .collect();
    let mut table = Table::new(&["k", "norm", "ratio"]);
    for (k, (n, r)) in norms.iter().zip(&ratios).enumerate() {
        table.push(vec![json!(k), json!(n), json!(r)]);
    }
    Ok(Report {
        result: json!({
            "t": a.t,
            "n": a.n,
            "gate": gate.as_ref().map(|g| g.label().to_string()),
            "kind": a.kind,
            "complement_dim": model.complement_dim(),
            "spectral_contraction": model.spectral_contraction(),
            "spectral_radius": model.spectral_radius(),
            "hermiticity_defect": model.hermiticity_defect(),
            "norms": norms,
            "ratios": ratios,
        }),
        table,
    })
}

fn bound_cmd(a: &BoundArgs) -> Result<Report, Error> {
    let v = depth_bound_log2(a.t, a.n, a.k, a.eta_bar)?;
    let depth = match a.eps {
        Some(e) if e > 0.0 && e < 1.0 => Some(haar_interleaved_depth(a.t, e)),
        Some(_) => return Err(Error::Argument("--eps must lie in (0, 1)".into())),
        None => None,
    };
    let mut table = Table::new(&["t", "n", "k", "eta_bar", "log2_bound", "haar_interleaved_depth"]);
    table.push(vec![json!(a.t), json!(a.n), json!(a.k), json!(a.eta_bar), json!(v), json!(depth)]);
    Ok(Report {
        result: json!({
            "t": a.t,
            "n": a.n,
            "k": a.k,
            "eta_bar": a.eta_bar,
            "log2_bound": v,
            "bound_below_one": v < 0.0,
            "eps": a.eps,
            "haar_interleaved_depth": depth,
        }),
        table,
    })
}

fn gap_cmd(a: &GapArgs) -> Result<Report, Error> {
    let g = hamiltonian_gap(a.t, a.n)?;
    let mut table = Table::new(&["t", "n", "gap", "ground_dim", "gram_rank", "lambda2", "projector_distance"]);
    table.push(vec![
        json!(g.t),
        json!(g.n),
        json!(g.gap),
        json!(g.ground_dim),
        json!(g.gram_rank),
        json!(g.lambda2),
        json!(g.projector_distance),
    ]);
    Ok(Report { result: serde_json::to_value(&g).unwrap_or(Value::Null), table })
}

fn frame_cmd(a: &FrameArgs) -> Result<Report, Error> {
    let seed = a.seed.unwrap_or(0);
    let block = a.block_size.min(a.samples / 2);
    let haar_value = factorial(a.t);
    let clifford_value = if a.n + 1 >= a.t && a.t <= 5 { Some(sigma_count(a.t)) } else { None };
    let mut table = Table::new(&["k", "estimate", "stderr", "predicted"]);
    let base = json!({
        "t": a.t,
        "n": a.n,
        "family": a.family,
        "samples": a.samples,
        "block_size": block,
        "seed": seed,
        "haar_value": haar_value,
        "clifford_value": clifford_value,
    });
    let est_json = |e: &FrameEstimate| json!({"estimate": e.estimate, "stderr": e.stderr, "samples": e.samples, "blocks": e.blocks});
    let mut result = base;
    match a.family {
        FamilyArg::Haar | FamilyArg::Clifford => {
            let fam = if a.family == FamilyArg::Haar { Family::Haar } else { Family::Clifford };
            let e = frame_potential_mc(a.t, a.n, &fam, a.samples, block, seed)?;
            let predicted = if a.family == FamilyArg::Haar { Some(haar_value) } else { clifford_value };
            table.push(vec![json!(0), json!(e.estimate), json!(e.stderr), json!(predicted)]);
            result["estimate"] = est_json(&e);
        }
        FamilyArg::Interleaved => {
            let gate = parse_gate(&a.gate)?;
            // t! + convergence_norm(k)² when the small-basis model is available
            let predicted: Option<Vec<f64>> = InterleavedModel::new(a.t, a.n, Some(&gate), ChannelKind::Standard)
                .ok()
                .map(|m| m.convergence_norms(a.k).iter().map(|v| haar_value as f64 + v * v).collect());
            let sweep = interleaved_sweep_mc(a.t, a.n, &gate, a.k, a.samples, block, seed)?;
            let ks: Vec<usize> = if a.sweep { (0..=a.k).collect() } else { vec![a.k] };
            let mut rows = Vec::new();
            for &k in &ks {
                let p = predicted.as_ref().map(|v| v[k]);
                table.push(vec![json!(k), json!(sweep[k].estimate), json!(sweep[k].stderr), json!(p)]);
                let mut r = est_json(&sweep[k]);
                r["k"] = json!(k);
                r["predicted"] = json!(p);
                rows.push(r);
            }
            result["gate"] = json!(gate.label());
            result["k"] = json!(a.k);
            result["estimates"] = json!(rows);
        }
    }
    Ok(Report { result, table })
}

fn pauli_string(p: &Pauli, n: usize) -> String {
    let mut s = String::with_capacity(n + 1);
    s.push(if p.is_negative() { '-' } else { '+' });
    for q in 0..n {
        s.push(match (p.x >> q & 1, p.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        });
    }
    s
}

fn sample_cmd(a: &SampleArgs) -> Result<Report, Error> {
    let seed = a.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new(&["index", "generator", "image"]);
    let mut out = Vec::new();
    for i in 0..a.count {
        let tab = sample_clifford(a.n, &mut rng)?;
        let xs: Vec<String> = tab.rows()[..a.n].iter().map(|p| pauli_string(p, a.n)).collect();
        let zs: Vec<String> = tab.rows()[a.n..].iter().map(|p| pauli_string(p, a.n)).collect();
        for (q, s) in xs.iter().enumerate() {
            table.push(vec![json!(i), json!(format!("X{q}")), json!(s)]);
        }
        for (q, s) in zs.iter().enumerate() {
            table.push(vec![json!(i), json!(format!("Z{q}")), json!(s)]);
        }
        out.push(json!({"x_images": xs, "z_images": zs}));
    }
    Ok(Report { result: json!({"n": a.n, "count": a.count, "seed": seed, "tableaux": out}), table })
}

pub fn dispatch(c: &Command) -> Result<Report, Failure> {
    let r = match c {
        Command::Enumerate(a) => enumerate(a),
        Command::Gram(a) => gram_cmd(a),
        Command::HaarOverlap(a) => haar_overlap_cmd(a),
        Command::Hamming(a) => hamming_cmd(a),
        Command::Eta(a) => eta_cmd(a),
        Command::Converge(a) => converge_cmd(a),
        Command::Bound(a) => bound_cmd(a),
        Command::Gap(a) => gap_cmd(a),
        Command::FramePotential(a) => frame_cmd(a),
        Command::SampleClifford(a) => sample_cmd(a),
    };
    r.map_err(Failure::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_specs() {
        assert_eq!(parse_gate("T").unwrap().label(), GateK::t_gate().label());
        assert!(parse_gate("phase:0.5").is_ok());
        assert!(parse_gate("1,0,0,0,0,0,1,0").unwrap().is_clifford());
        assert!(parse_gate("1,0,0,0,0,0,2,0").is_err());
        assert!(parse_gate("nope").is_err());
    }

    #[test]
    fn pauli_strings() {
        let p = Pauli::hermitian(0b01, 0b11, true);
        assert_eq!(pauli_string(&p, 2), "-YZ");
    }

    #[test]
    fn names_match_subcommands() {
        use clap::CommandFactory;
        let cmd = crate::Cli::command();
        let subs: Vec<&str> = cmd.get_subcommands().map(|s| s.get_name()).collect();
        assert_eq!(subs, NAMES.to_vec());
    }
}
