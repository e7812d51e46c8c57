//! Hamming-weight preservation probabilities for stochastic orthogonal
//! matrices and stochastic Lagrangian subspaces.
//!
//! All probabilities are exact dyadic rationals.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, F2Subspace};
use crate::lagrangian::StochasticLagrangian;

/// Largest t for brute-force enumeration over F₂^t.
pub const MAX_HAMMING_T: usize = 20;

pub type Probability = Ratio<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    /// Exact probability as (numerator, denominator) in lowest terms.
    #[serde(serialize_with = "ser_ratio")]
    pub probability: Probability,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: Probability,
    /// Column weight that produced `bound`; `None` when the bound is the
    /// trivial value 1 (no column heavier than 1).
    pub bound_column_weight: Option<u32>,
    pub saturated: bool,
}

impl WeightReport {
    pub fn probability_f64(&self) -> f64 {
        to_f64(self.probability)
    }

    pub fn bound_f64(&self) -> f64 {
        to_f64(self.bound)
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Probability, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(to_f64(*r))
}

pub fn to_f64(r: Probability) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// ½ + 2^{−(r+1)} C(r+1, (r+1)/2) for odd r, ½ for even r ≥ 2.
pub fn column_weight_bound(r: u32) -> Result<Probability> {
    if r == 0 || r > 61 {
        return Err(Error::arg(format!("column weight must lie in 1..=61, got {r}")));
    }
    let half = Ratio::new(1, 2);
    if r.is_multiple_of(2) {
        return Ok(half);
    }
    let m = u64::from(r) + 1;
    Ok(half + Ratio::new(binomial(m, m / 2), 1u64 << m))
}

/// The probability term 2^{−r} C(r+1, (r+1)/2) on its own (odd r), which at
/// r = 5 equals 0.625.
pub fn flip_term(r: u32) -> Result<Probability> {
    if r.is_multiple_of(2) {
        return Ok(Ratio::from_integer(0));
    }
    Ok((column_weight_bound(r)? - Ratio::new(1, 2)) * 2)
}

fn check_t(t: usize) -> Result<()> {
    if t == 0 || t > MAX_HAMMING_T {
        return Err(Error::resource(format!("brute force supports 1 ≤ t ≤ {MAX_HAMMING_T}, got {t}")));
    }
    Ok(())
}

/// Pr_y[h(Oy) = h(y)] over uniform y ∈ F₂^t, with the sharpest column bound.
pub fn preserve_prob(o: &BitMatrix) -> Result<WeightReport> {
    let t = o.size();
    check_t(t)?;
    if !o.is_invertible() {
        return Err(Error::arg("matrix is not invertible"));
    }
    let mut count = 0u64;
    for y in 0..1u64 << t {
        if o.apply_word(y).count_ones() == y.count_ones() {
            count += 1;
        }
    }
    let probability = Ratio::new(count, 1u64 << t);
    let best = o
        .column_words()
        .iter()
        .map(|c| c.count_ones())
        .filter(|&w| w > 1)
        .map(|w| column_weight_bound(w).map(|b| (b, w)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min();
    let (bound, weight) = match best {
        Some((b, w)) => (b, Some(w)),
        None => (Ratio::from_integer(1), None),
    };
    Ok(WeightReport { probability, bound, bound_column_weight: weight, saturated: probability == bound })
}

/// Pr_{(x,y)∈T}[h(x) = h(y)]; bounded by 7/8 unless T is a permutation.
pub fn pair_prob(lagrangian: &StochasticLagrangian) -> Result<WeightReport> {
    let t = lagrangian.t();
    check_t(t)?;
    let count = lagrangian.pairs().filter(|(x, y)| x.count_ones() == y.count_ones()).count();
    let probability = Ratio::new(count as u64, 1u64 << t);
    let bound = if lagrangian.is_permutation() { Ratio::from_integer(1) } else { Ratio::new(7, 8) };
    Ok(WeightReport { probability, bound, bound_column_weight: None, saturated: probability == bound })
}

/// Pr_{x∈N^⊥}[h(x) = h(x+n)] for uniform x in the orthogonal complement of
/// `n_space`. Any subspace is accepted; defect subspaces pass `space()`.
pub fn defect_shift_prob(n_space: &F2Subspace, shift: &BitVec) -> Result<Probability> {
    check_t(n_space.ambient_dim())?;
    if !n_space.contains(shift)? {
        return Err(Error::arg(format!("shift {shift} is not in N")));
    }
    let perp = n_space.perp();
    let s = shift.bits();
    let count = perp.element_words().filter(|&x| x.count_ones() == (x ^ s).count_ones()).count();
    Ok(Ratio::new(count as u64, 1u64 << perp.dim()))
}
