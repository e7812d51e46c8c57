//! Stochastic Lagrangian subspaces, the stochastic orthogonal group and
//! defect subspaces.
//!
//! An element of F₂^{2t} is stored as one word with `x` in bits `0..t` and
//! `y` in bits `t..2t`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{qq_word, BitMatrix, BitVec, F2Subspace};

/// Largest `t` for which the full set Σ_{t,t} is enumerated.
pub const MAX_SIGMA_T: usize = 5;
/// Largest `t` for which O_t is enumerated.
pub const MAX_OT_T: usize = 6;
/// Largest `t` accepted when building individual Lagrangians.
pub const MAX_T: usize = 16;

#[inline]
fn low_mask(t: usize) -> u64 {
    (1u64 << t) - 1
}

#[inline]
pub(crate) fn pack(x: u64, y: u64, t: usize) -> u64 {
    x | (y << t)
}

#[inline]
pub(crate) fn unpack(w: u64, t: usize) -> (u64, u64) {
    (w & low_mask(t), w >> t)
}

/// `|Σ_{t,t}| = ∏_{k=0}^{t−2} (2^k + 1)`.
pub fn sigma_count(t: usize) -> u64 {
    (0..t.saturating_sub(1)).map(|k| (1u64 << k) + 1).product()
}

fn check_t(t: usize, max: usize) -> Result<()> {
    if t == 0 || t > max {
        return Err(Error::resource(format!("t = {t} outside supported range 1..={max}")));
    }
    Ok(())
}

/// Element of the stochastic orthogonal group O_t.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StochasticOrthogonal {
    matrix: BitMatrix,
}

impl StochasticOrthogonal {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        let t = matrix.size();
        let cols = matrix.column_words();
        // q(Ox) = q(x) for all x  ⟺  every column has weight 1 mod 4 and
        // distinct columns have even overlap (polarization of q).
        for (i, &c) in cols.iter().enumerate() {
            if c.count_ones() % 4 != 1 {
                return Err(Error::arg(format!("column {i} has weight {} ≢ 1 mod 4", c.count_ones())));
            }
            for &d in &cols[..i] {
                if (c & d).count_ones() % 2 != 0 {
                    return Err(Error::arg("columns are not pairwise orthogonal"));
                }
            }
        }
        if cols.iter().fold(0u64, |a, &c| a ^ c) != low_mask(t) {
            return Err(Error::arg("matrix does not fix the all-ones vector"));
        }
        Ok(Self { matrix })
    }

    pub fn identity(t: usize) -> Self {
        Self { matrix: BitMatrix::identity(t) }
    }

    pub fn permutation(perm: &[usize]) -> Result<Self> {
        Self::new(BitMatrix::permutation(perm)?)
    }

    pub fn t(&self) -> usize {
        self.matrix.size()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &BitVec) -> Result<BitVec> {
        self.matrix.apply(x)
    }

    pub fn is_permutation(&self) -> bool {
        self.matrix.is_permutation()
    }

    /// Image of coordinate `i` when this is a permutation matrix.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        self.is_permutation().then(|| self.matrix.column_words().iter().map(|c| c.trailing_zeros() as usize).collect())
    }
}

/// Zero diagonal, ones elsewhere. Lies in O_t only when t ≡ 2 mod 4.
pub fn anti_identity(t: usize) -> Result<StochasticOrthogonal> {
    if !(2..=MAX_T).contains(&t) {
        return Err(Error::arg(format!("anti-identity needs 2 ≤ t ≤ {MAX_T}, got {t}")));
    }
    if t % 4 != 2 {
        return Err(Error::arg(format!("anti-identity at t = {t} has column weight {} ≢ 1 mod 4", t - 1)));
    }
    let cols = (0..t).map(|i| low_mask(t) ^ (1 << i)).collect();
    StochasticOrthogonal::new(BitMatrix::from_column_words(t, cols))
}

/// Enumerates O_t by depth-first search over columns.
pub fn enumerate_ot(t: usize) -> Result<Vec<StochasticOrthogonal>> {
    check_t(t, MAX_OT_T)?;
    let candidates: Vec<u64> = (1u64..(1 << t)).filter(|c| c.count_ones() % 4 == 1).collect();
    let mut out = Vec::new();
    let mut cols = Vec::with_capacity(t);
    fn dfs(t: usize, cand: &[u64], cols: &mut Vec<u64>, out: &mut Vec<StochasticOrthogonal>) {
        if cols.len() == t {
            if cols.iter().fold(0u64, |a, &c| a ^ c) == low_mask(t) {
                out.push(StochasticOrthogonal { matrix: BitMatrix::from_column_words(t, cols.clone()) });
            }
            return;
        }
        for &c in cand {
            if cols.iter().all(|&d| d != c && (c & d).count_ones() % 2 == 0) {
                cols.push(c);
                dfs(t, cand, cols, out);
                cols.pop();
            }
        }
    }
    dfs(t, &candidates, &mut cols, &mut out);
    Ok(out)
}

/// Isotropic subspace N ⊆ F₂^t with q ≡ 0 on N and the all-ones vector in N^⊥.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DefectSubspace {
    space: F2Subspace,
}

impl DefectSubspace {
    pub fn new(space: F2Subspace) -> Result<Self> {
        let t = space.ambient_dim();
        // q vanishes on N iff it vanishes on a basis and the basis is pairwise orthogonal
        for (i, &b) in space.words().iter().enumerate() {
            if b.count_ones() % 4 != 0 {
                return Err(Error::arg("defect basis vector has weight ≢ 0 mod 4"));
            }
            for &c in &space.words()[..i] {
                if (b & c).count_ones() % 2 != 0 {
                    return Err(Error::arg("defect space is not isotropic"));
                }
            }
            if !(b & low_mask(t)).count_ones().is_multiple_of(2) {
                return Err(Error::arg("all-ones vector is not orthogonal to the defect space"));
            }
        }
        Ok(Self { space })
    }

    pub fn trivial(t: usize) -> Self {
        Self { space: F2Subspace::zero(t) }
    }

    pub fn space(&self) -> &F2Subspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn t(&self) -> usize {
        self.space.ambient_dim()
    }
}

/// A member of Σ_{t,t}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StochasticLagrangian {
    t: usize,
    space: F2Subspace,
    left_defect_dim: usize,
    right_defect_dim: usize,
    is_permutation: bool,
}

impl StochasticLagrangian {
    pub fn new(space: F2Subspace) -> Result<Self> {
        if !is_stochastic_lagrangian(&space)? {
            return Err(Error::arg(format!("{space:?} is not a stochastic Lagrangian subspace")));
        }
        Ok(Self::from_valid(space))
    }

    fn from_valid(space: F2Subspace) -> Self {
        let t = space.ambient_dim() / 2;
        let left = left_defect_space(&space, t);
        let right = right_defect_space(&space, t);
        let mut out =
            Self { t, space, left_defect_dim: left.dim(), right_defect_dim: right.dim(), is_permutation: false };
        out.is_permutation = out.orthogonal_part().is_some_and(|o| o.is_permutation());
        out
    }

    /// T_O = {(Ox, x)}.
    pub fn from_orthogonal(o: &StochasticOrthogonal) -> Self {
        let t = o.t();
        let words = (0..t).map(|j| pack(o.matrix().column_words()[j], 1 << j, t));
        Self::from_valid(F2Subspace::from_words(2 * t, words))
    }

    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        Ok(Self::from_orthogonal(&StochasticOrthogonal::permutation(perm)?))
    }

    pub fn identity(t: usize) -> Self {
        Self::from_orthogonal(&StochasticOrthogonal::identity(t))
    }

    /// The Lagrangian {(x, y) : x ∈ N^⊥, y ∈ N^⊥, x + y ∈ N}, whose left and right
    /// defects both equal `n`.
    pub fn diagonal_defect(n: &DefectSubspace) -> Result<Self> {
        let t = n.t();
        let mut words: Vec<u64> = n.space().words().iter().map(|&v| pack(v, 0, t)).collect();
        words.extend(n.space().perp().words().iter().map(|&v| pack(v, v, t)));
        Self::new(F2Subspace::from_words(2 * t, words))
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn space(&self) -> &F2Subspace {
        &self.space
    }

    pub fn left_defect_dim(&self) -> usize {
        self.left_defect_dim
    }

    pub fn right_defect_dim(&self) -> usize {
        self.right_defect_dim
    }

    pub fn is_permutation(&self) -> bool {
        self.is_permutation
    }

    /// Pairs `(x, y)` of all 2^t elements, as words.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let t = self.t;
        self.space.element_words().map(move |w| unpack(w, t))
    }

    /// `(N_left, N_right)` with `N_left = {x : (x,0) ∈ T}` and `N_right = {y : (0,y) ∈ T}`.
    pub fn defects(&self) -> (DefectSubspace, DefectSubspace) {
        let left = left_defect_space(&self.space, self.t);
        let right = right_defect_space(&self.space, self.t);
        (DefectSubspace { space: left }, DefectSubspace { space: right })
    }

    /// `{x : ∃y, (x,y) ∈ T}`.
    pub fn left_projection(&self) -> F2Subspace {
        let t = self.t;
        F2Subspace::from_words(t, self.space.words().iter().map(|&w| unpack(w, t).0))
    }

    /// O with T = T_O, when both defects are trivial.
    pub fn orthogonal_part(&self) -> Option<StochasticOrthogonal> {
        if self.left_defect_dim != 0 {
            return None;
        }
        let t = self.t;
        let mut cols = vec![0u64; t];
        let mut found = 0u64;
        for (x, y) in self.pairs() {
            if y.count_ones() == 1 {
                let j = y.trailing_zeros() as usize;
                cols[j] = x;
                found |= y;
            }
        }
        debug_assert_eq!(found, low_mask(t));
        Some(StochasticOrthogonal { matrix: BitMatrix::from_column_words(t, cols) })
    }

    /// Sort key used for the canonical ordering of Σ_{t,t}.
    fn order_key(&self) -> (u8, Vec<usize>, usize, Vec<u64>) {
        match self.orthogonal_part().and_then(|o| o.as_permutation()) {
            Some(p) => (0, p, 0, Vec::new()),
            None => (1, Vec::new(), self.left_defect_dim, self.space.words().to_vec()),
        }
    }
}

fn left_defect_space(space: &F2Subspace, t: usize) -> F2Subspace {
    let axis = F2Subspace::from_words(2 * t, (0..t).map(|i| 1u64 << i));
    let cap = space.intersect(&axis).expect("same ambient");
    F2Subspace::from_words(t, cap.words().iter().map(|&w| unpack(w, t).0))
}

fn right_defect_space(space: &F2Subspace, t: usize) -> F2Subspace {
    let axis = F2Subspace::from_words(2 * t, (t..2 * t).map(|i| 1u64 << i));
    let cap = space.intersect(&axis).expect("same ambient");
    F2Subspace::from_words(t, cap.words().iter().map(|&w| unpack(w, t).1))
}

/// Checks the three defining properties of Σ_{t,t}.
///
/// 𝔮 is a Z₄-valued quadratic form whose polar form is the dot product mod 2,
/// so total isotropy holds iff 𝔮 vanishes on the basis and the basis is
/// pairwise orthogonal.
pub fn is_stochastic_lagrangian(space: &F2Subspace) -> Result<bool> {
    let amb = space.ambient_dim();
    if !amb.is_multiple_of(2) {
        return Err(Error::arg(format!("ambient dimension {amb} is odd")));
    }
    let t = amb / 2;
    if space.dim() != t || !space.contains_word((1u64 << amb) - 1) {
        return Ok(false);
    }
    let words = space.words();
    for (i, &b) in words.iter().enumerate() {
        let (x, y) = unpack(b, t);
        if qq_word(x, y) != 0 {
            return Ok(false);
        }
        if words[..i].iter().any(|&c| (b & c).count_ones() % 2 != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Σ_{t,t} in canonical order: permutations first (lexicographic in the
/// image list), then the rest by (defect dimension, basis words).
pub fn enumerate_sigma(t: usize) -> Result<Vec<StochasticLagrangian>> {
    check_t(t, MAX_SIGMA_T)?;
    let amb = 2 * t;
    let ones = (1u64 << amb) - 1;
    // grow totally isotropic subspaces containing the all-ones vector, one
    // dimension per level; only coset representatives reduced against the
    // current basis are tried
    let mut level: Vec<F2Subspace> = vec![F2Subspace::from_words(amb, [ones])];
    for _ in 1..t {
        let next: BTreeSet<F2Subspace> = level
            .par_iter()
            .flat_map_iter(|s| {
                let words = s.words();
                let pivots: u64 = words.iter().map(|&r| r & r.wrapping_neg()).fold(0, |a, b| a | b);
                (1u64..(1 << amb))
                    .filter(move |&v| v & pivots == 0)
                    .filter(move |&v| {
                        let (x, y) = unpack(v, t);
                        qq_word(x, y) == 0 && words.iter().all(|&b| (b & v).count_ones() % 2 == 0)
                    })
                    .map(move |v| {
                        let mut n = s.clone();
                        n.insert_word(v);
                        n
                    })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        level = next.into_iter().collect();
    }
    let mut out: Vec<StochasticLagrangian> = level.into_iter().map(StochasticLagrangian::from_valid).collect();
    out.sort_by_cached_key(|s| s.order_key());
    debug_assert_eq!(out.len() as u64, sigma_count(t));
    Ok(out)
}

/// Cached canonical Σ_{t,t}.
pub fn sigma(t: usize) -> Result<&'static [StochasticLagrangian]> {
    static CACHE: [OnceLock<Vec<StochasticLagrangian>>; MAX_SIGMA_T + 1] = [const { OnceLock::new() }; MAX_SIGMA_T + 1];
    check_t(t, MAX_SIGMA_T)?;
    Ok(CACHE[t].get_or_init(|| enumerate_sigma(t).expect("t checked")))
}

/// `N = span{1111}`, the defect direction at t = 4.
pub fn all_ones_defect(t: usize) -> Result<DefectSubspace> {
    DefectSubspace::new(F2Subspace::from_words(t, [low_mask(t)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    fn sub(t: usize, rows: &[(&str, &str)]) -> F2Subspace {
        let rows: Vec<BitVec> =
            rows.iter().map(|(x, y)| x.parse::<BitVec>().unwrap().concat(&y.parse().unwrap()).unwrap()).collect();
        F2Subspace::span_in(2 * t, &rows).unwrap()
    }

    #[test]
    fn small_lagrangian_checks() {
        assert!(is_stochastic_lagrangian(StochasticLagrangian::identity(3).space()).unwrap());
        assert!(is_stochastic_lagrangian(&sub(2, &[("10", "01"), ("01", "10")])).unwrap());
        assert!(!is_stochastic_lagrangian(&sub(2, &[("10", "10"), ("01", "11")])).unwrap());
        assert!(is_stochastic_lagrangian(&F2Subspace::zero(5)).is_err());
    }

    #[test]
    fn isotropy_certificate_matches_exhaustive_check() {
        // compare the basis-level criterion against checking 𝔮 on every element
        for t in 1..=4 {
            for s in sigma(t).unwrap() {
                assert!(s.pairs().all(|(x, y)| qq_word(x, y) == 0));
            }
        }
        // and a few random subspaces that pass or fail
        let mut state = 0x9e3779b97f4a7c15u64;
        for t in 2..=4 {
            for _ in 0..300 {
                let mut words = vec![(1u64 << (2 * t)) - 1];
                for _ in 1..t {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    words.push(state & ((1 << (2 * t)) - 1));
                }
                let s = F2Subspace::from_words(2 * t, words);
                let exhaustive = s.dim() == t
                    && s.element_words().all(|w| {
                        let (x, y) = unpack(w, t);
                        qq_word(x, y) == 0
                    });
                assert_eq!(is_stochastic_lagrangian(&s).unwrap(), exhaustive);
            }
        }
    }

    #[test]
    fn sigma_counts_and_permutation_prefix() {
        let expected = [1, 2, 6, 30, 270];
        for t in 1..=5 {
            let s = sigma(t).unwrap();
            assert_eq!(s.len(), expected[t - 1]);
            assert_eq!(s.len() as u64, sigma_count(t));
            let perms = s.iter().filter(|x| x.is_permutation()).count();
            assert_eq!(perms, factorial(t));
            assert!(s[..perms].iter().all(|x| x.is_permutation()));
            assert!(s[..perms].windows(2).all(|w| w[0].order_key() < w[1].order_key()));
            assert_eq!(s[0], StochasticLagrangian::identity(t));
        }
        assert!(enumerate_sigma(6).is_err());
        assert!(enumerate_sigma(0).is_err());
    }

    #[test]
    fn sigma_invariants() {
        for t in 1..=5 {
            for s in sigma(t).unwrap() {
                assert!(s.space().contains_word((1 << (2 * t)) - 1));
                let (l, r) = s.defects();
                assert_eq!(l.dim(), r.dim());
                assert!(l.dim() <= t / 2);
                assert_eq!(s.left_projection(), l.space().perp());
                // defects are genuine defect subspaces
                DefectSubspace::new(l.space().clone()).unwrap();
                DefectSubspace::new(r.space().clone()).unwrap();
            }
        }
    }

    #[test]
    fn t4_has_single_defect_direction() {
        let s = sigma(4).unwrap();
        let defective: Vec<_> = s.iter().filter(|x| x.left_defect_dim() > 0).collect();
        assert!(!defective.is_empty());
        let ones = all_ones_defect(4).unwrap();
        for d in &defective {
            let (l, r) = d.defects();
            assert_eq!((l.dim(), r.dim()), (1, 1));
            assert_eq!(l, ones);
            assert_eq!(r, ones);
        }
        let diag = StochasticLagrangian::diagonal_defect(&ones).unwrap();
        assert!(s.contains(&diag));
    }

    #[test]
    fn permutation_defects_are_trivial() {
        let p = StochasticLagrangian::from_permutation(&[2, 0, 1, 3]).unwrap();
        let (l, r) = p.defects();
        assert_eq!((l.dim(), r.dim()), (0, 0));
        assert!(p.is_permutation());
    }

    #[test]
    fn ot_small_t_is_permutations() {
        for t in 1..=4 {
            let ot = enumerate_ot(t).unwrap();
            assert_eq!(ot.len(), factorial(t));
            assert!(ot.iter().all(|o| o.is_permutation()));
        }
    }

    #[test]
    fn ot_t6_contains_anti_identity() {
        let ot = enumerate_ot(6).unwrap();
        let anti = anti_identity(6).unwrap();
        assert!(!anti.is_permutation());
        assert!(ot.contains(&anti));
        let unique: BTreeSet<_> = ot.iter().collect();
        assert_eq!(unique.len(), ot.len());
        for o in &ot {
            assert!(o.matrix().columns().all(|c| c.weight() % 4 == 1));
            assert!(o.matrix().is_invertible());
            // exhaustive q-preservation
            for x in 0u64..64 {
                assert_eq!(o.matrix().apply_word(x).count_ones() % 4, x.count_ones() % 4);
            }
            assert!(is_stochastic_lagrangian(StochasticLagrangian::from_orthogonal(o).space()).unwrap());
        }
    }

    #[test]
    fn anti_identity_cases() {
        let a2 = anti_identity(2).unwrap();
        assert_eq!(a2.as_permutation(), Some(vec![1, 0]));
        assert!(anti_identity(4).is_err());
        assert!(anti_identity(6).is_ok());
        assert!(anti_identity(10).is_ok());
    }

    #[test]
    fn zero_defect_elements_are_graphs_of_ot() {
        for t in 1..=4 {
            let from_sigma: BTreeSet<_> =
                sigma(t).unwrap().iter().filter(|s| s.left_defect_dim() == 0).map(|s| s.space().clone()).collect();
            let from_ot: BTreeSet<_> = enumerate_ot(t)
                .unwrap()
                .iter()
                .map(|o| StochasticLagrangian::from_orthogonal(o).space().clone())
                .collect();
            assert_eq!(from_sigma, from_ot);
        }
    }

    #[test]
    fn orthogonal_round_trip() {
        let anti = anti_identity(6).unwrap();
        let t = StochasticLagrangian::from_orthogonal(&anti);
        assert_eq!(t.orthogonal_part().unwrap(), anti);
        assert!(!t.is_permutation());
        assert_eq!(t.left_defect_dim(), 0);
    }

    #[test]
    fn enumeration_is_deterministic() {
        assert_eq!(enumerate_sigma(4).unwrap(), enumerate_sigma(4).unwrap());
    }
}
