//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every criterion runs regardless of the
//! outcome of the others.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use cdl::commutant::{exact_cofactor, gram, gram_schmidt_cofactors, CommutantModel};
use cdl::gf2::BitVec;
use cdl::hamming::{defect_shift_prob, pair_prob, preserve_prob};
use cdl::lagrangian::{all_ones_defect, anti_identity, enumerate_sigma, sigma, StochasticLagrangian};
use cdl::moments::{choi, eta, relative_design_check, ChannelKind, GateK, InterleavedModel};
use cdl::operators::{css_projector, haar_apply, haar_overlap, permutations, r_of};
use cdl::stabilizer::{
    clifford1_moment, dense_convergence_norm, haar_projector_dense, hamiltonian_gap, interleaved_sweep_mc, spearman,
    DEFAULT_BLOCK_SIZE,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn enumeration_counts() -> Outcome {
    let expected = [(2usize, 2usize, 2usize), (3, 6, 6), (4, 30, 24), (5, 270, 120)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (t, count, perms) in expected {
        let start = Instant::now();
        let s = enumerate_sigma(t).expect("enumeration");
        let took = start.elapsed();
        let limit = if t <= 4 { Duration::from_secs(10) } else { Duration::from_secs(600) };
        let p = s.iter().filter(|x| x.is_permutation()).count();
        let ok = s.len() == count && p == perms && took < limit;
        pass &= ok;
        parts.push(format!("t={t}: {}/{p} in {:.2}s", s.len(), took.as_secs_f64()));
    }
    Outcome::new(pass, parts.join(", "))
}

fn row_sums() -> Outcome {
    let mut worst = 0f64;
    for t in 1..=4usize {
        for n in 2..=12usize {
            let model = gram(t, n).expect("gram");
            let want: f64 = (0..t.saturating_sub(1)).map(|r| 1.0 + (r as f64 - n as f64).exp2()).product();
            for s in model.row_sums() {
                worst = worst.max(rel_err(s, want));
            }
        }
    }
    Outcome::new(worst <= 1e-12, format!("max relative error {worst:.3e} (tol 1e-12)"))
}

fn norm_equalities() -> Outcome {
    let mut worst = 0f64;
    let mut checked = 0;
    for t in 1..=5usize {
        for s in sigma(t).expect("sigma") {
            let r = r_of(s).expect("r(T)");
            let k = s.left_defect_dim() as f64;
            let tf = t as f64;
            let sv = r.singular_values();
            let one: f64 = sv.iter().sum();
            let two = sv.iter().map(|x| x * x).sum::<f64>().sqrt();
            let inf = sv.iter().cloned().fold(0.0, f64::max);
            worst = worst
                .max((one - (tf - k).exp2()).abs())
                .max((two - (tf / 2.0).exp2()).abs())
                .max((inf - k.exp2()).abs());
            checked += 1;
        }
    }
    Outcome::new(worst <= 1e-10, format!("{checked} subspaces, max deviation {worst:.3e} (tol 1e-10)"))
}

fn haar_symmetrization() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [4usize, 5] {
        let max = sigma(t)
            .expect("sigma")
            .iter()
            .filter(|s| !s.is_permutation())
            .map(|s| haar_overlap(s).expect("overlap"))
            .fold(f64::NEG_INFINITY, f64::max);
        // 7/8 is attained, so allow rounding on the equality case only
        pass &= max <= 0.875 + 1e-12;
        parts.push(format!("t={t} max {max:.12}"));
    }
    let n = all_ones_defect(4).expect("defect");
    let p = css_projector(&n).expect("P_N");
    let ph = haar_apply(4, &p).expect("P_H");
    let css = 0.25 * p.hs_inner(&ph).re;
    pass &= (css - 0.7).abs() <= 1e-10;
    parts.push(format!("CSS {css:.12}"));
    let anti = StochasticLagrangian::from_orthogonal(&anti_identity(6).expect("anti-identity"));
    let v = haar_overlap(&anti).expect("overlap");
    pass &= (v - 4.0 / 7.0).abs() <= 1e-10;
    parts.push(format!("anti-identity {v:.12}"));
    Outcome::new(pass, parts.join(", "))
}

fn hamming_values() -> Outcome {
    let anti = preserve_prob(anti_identity(6).expect("anti-identity").matrix()).expect("preserve");
    let n = all_ones_defect(4).expect("defect");
    let pair = pair_prob(&StochasticLagrangian::diagonal_defect(&n).expect("T_N")).expect("pair");
    let shift = defect_shift_prob(n.space(), &BitVec::ones(4)).expect("shift");
    let pass =
        anti.probability == Ratio::new(13, 16) && pair.probability == Ratio::new(7, 8) && shift == Ratio::new(3, 4);
    Outcome::new(
        pass,
        format!("anti-identity {}, defect pair {}, defect shift {}", anti.probability, pair.probability, shift),
    )
}

fn frobenius(a: &DMatrix<cdl::operators::C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn design_facts() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for t in 2..=4usize {
        let dist = frobenius(&(clifford1_moment(t).expect("moment") - haar_projector_dense(t, 1).expect("P_H")));
        pass &= if t <= 3 { dist <= 1e-10 } else { dist > 0.1 };
        parts.push(format!("t={t} distance {dist:.3e}"));
    }
    let cl = clifford1_moment(2).expect("moment");
    let h = haar_projector_dense(2, 1).expect("P_H");
    let rel = relative_design_check(&cl, &h, 1e-9).expect("Choi");
    let trace = choi(&cl).expect("Choi").trace().re;
    pass &= rel;
    parts.push(format!("relative design (eps 1e-9) {rel}, Choi trace {trace:.6}"));
    Outcome::new(pass, parts.join(", "))
}

fn oracle_equivalence() -> Outcome {
    let gate = GateK::t_gate();
    let mut pass = true;
    let mut parts = Vec::new();

    let small = InterleavedModel::new(3, 2, Some(&gate), ChannelKind::Standard).expect("model");
    let mut worst = 0f64;
    for k in 1..=3 {
        let dense = dense_convergence_norm(3, 2, &gate, k).expect("dense");
        let model = small.convergence_norm(k);
        worst = worst.max(dense.abs()).max(model.abs()).max((dense - model).abs());
    }
    pass &= worst <= 1e-10;
    parts.push(format!("t=3 n=2 max |norm| {worst:.1e}"));

    let model = InterleavedModel::new(4, 3, Some(&gate), ChannelKind::Standard).expect("model");
    let exact: Vec<f64> = (0..=10).map(|k| model.convergence_norm(k).powi(2)).collect();
    let decreasing = exact.windows(2).all(|w| w[1] < w[0]);
    let start = Instant::now();
    let mc = interleaved_sweep_mc(4, 3, &gate, 10, 100_000, DEFAULT_BLOCK_SIZE, 1).expect("sweep");
    let took = start.elapsed();
    let excess: Vec<f64> = mc.iter().map(|e| e.estimate - 24.0).collect();
    let rho = spearman(&excess, &exact);
    pass &= decreasing && rho > 0.99 && took < Duration::from_secs(300);
    let shown: Vec<String> = excess.iter().zip(&exact).map(|(m, e)| format!("{m:.2}/{e:.2}")).collect();
    parts.push(format!(
        "t=4 n=3 FP-24 vs norm^2 [{}], exact decreasing {decreasing}, Spearman {rho:.4}, {:.1}s",
        shown.join(" "),
        took.as_secs_f64()
    ));
    Outcome::new(pass, parts.join("; "))
}

fn contraction() -> Outcome {
    let t_gate = GateK::t_gate();
    let e = eta(4, &t_gate).expect("eta");
    let model = InterleavedModel::new(4, 8, Some(&t_gate), ChannelKind::Standard).expect("model");
    let norms = model.convergence_norms(50);
    let ratio = norms[50] / norms[49];
    let contraction = model.spectral_contraction();
    let gap = (ratio - contraction).abs();
    let clifford = InterleavedModel::new(4, 8, Some(&GateK::s_gate()), ChannelKind::Standard).expect("model");
    let cn = clifford.convergence_norms(50);
    let clifford_ratio = cn[50] / cn[49];
    let pass = e < 1.0 && gap <= 1e-6 && (clifford_ratio - 1.0).abs() <= 1e-9;
    Outcome::new(
        pass,
        format!(
            "eta {e:.6}, ratio at k=50 {ratio:.9}, contraction {contraction:.9}, |difference| {gap:.3e} (tol 1e-6), Clifford ratio {clifford_ratio:.12}"
        ),
    )
}

fn spectral_gap() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let r = hamiltonian_gap(2, n).expect("gap");
        let identity = (r.lambda2 - (1.0 - r.gap / n as f64)).abs();
        pass &= r.gap > 0.0 && r.ground_dim == 2 && identity <= 1e-10;
        parts.push(format!("n={n}: gap {:.6}, ground dim {}, identity error {identity:.1e}", r.gap, r.ground_dim));
    }
    let took = start.elapsed();
    pass &= took < Duration::from_secs(60);
    parts.push(format!("{:.1}s", took.as_secs_f64()));
    Outcome::new(pass, parts.join(", "))
}

/// (−1)^{i+j} det of the leading (j+1)-block of Γ with row j and column i
/// removed, as an exact signed sum over permutations of dyadic entries.
fn permutation_sum(model: &CommutantModel, i: usize, j: usize) -> BigRational {
    let size = j + 1;
    let n = model.n() as i64;
    let mut total = BigRational::zero();
    for p in permutations(size).into_iter().filter(|p| p[j] == i) {
        let inversions =
            (0..size).flat_map(|a| (a + 1..size).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count();
        let exponent: i64 = (0..j).map(|l| n * i64::from(model.gram_log2(l, p[l]))).sum();
        let magnitude = if exponent >= 0 {
            BigRational::from_integer(BigInt::one() << exponent as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-exponent) as usize)
        };
        if inversions % 2 == 0 {
            total += magnitude;
        } else {
            total -= magnitude;
        }
    }
    total
}

fn gram_schmidt_bounds() -> Outcome {
    let model = gram(4, 18).expect("gram");
    let basis = gram_schmidt_cofactors(&model).expect("cofactors");
    let bounds = basis.check_bounds(&model);
    let overlap = basis.max_normalized_overlap(&model);
    let mut mismatches = 0;
    let mut float_error = 0f64;
    for j in 0..=6 {
        for i in 0..=j {
            let exact = exact_cofactor(&model, i, j).expect("cofactor");
            if exact != permutation_sum(&model, i, j) {
                mismatches += 1;
            }
            let exact = exact.to_f64().expect("finite");
            // columns are scaled by a leading minor of order one
            float_error = float_error.max((basis.coefficients[(i, j)] - exact).abs());
        }
    }
    let pass = bounds.applicable
        && bounds.defect_weighted
        && bounds.off_diagonal
        && bounds.diagonal
        && overlap <= 1e-8
        && mismatches == 0
        && float_error <= 1e-12;
    Outcome::new(
        pass,
        format!(
            "bounds {}/{}/{} (slack log2 {:.1}, {:.1}, {:.1}), max overlap {overlap:.1e}, exact cofactor vs permutation sum mismatches {mismatches}, floating cofactor error {float_error:.1e}",
            bounds.defect_weighted,
            bounds.off_diagonal,
            bounds.diagonal,
            bounds.slack_log2[0],
            bounds.slack_log2[1],
            bounds.slack_log2[2]
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 10] = [
        ("enumeration counts", enumeration_counts),
        ("Gram row sums", row_sums),
        ("r(T) norm equalities", norm_equalities),
        ("Haar symmetrization values", haar_symmetrization),
        ("Hamming probabilities", hamming_values),
        ("single-qubit design facts", design_facts),
        ("oracle equivalence", oracle_equivalence),
        ("contraction ratio", contraction),
        ("spectral gap", spectral_gap),
        ("Gram-Schmidt bounds", gram_schmidt_bounds),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({})",
            k + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            name,
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
