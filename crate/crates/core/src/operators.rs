//! Dense operators on t copies of a qubit: r(T), Q_T, CSS projectors,
//! permutation operators and the Haar/diagonal symmetrizers.
//!
//! Basis index `x` of (C²)^{⊗t} encodes the bit string with coordinate `i`
//! in bit `i`, matching [`crate::gf2`].

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lagrangian::{enumerate_ot, DefectSubspace, StochasticLagrangian, StochasticOrthogonal};

pub type C64 = Complex64;

/// Largest number of qubits for which r(T) is materialized densely.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest t for which the Haar symmetrizer is built.
pub const MAX_HAAR_T: usize = 6;

/// Square complex matrix acting on a register of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    qubits: usize,
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::arg(format!(
                "operator must be square with power-of-two dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("operator has non-finite entries"));
        }
        Ok(Self { qubits: dim.trailing_zeros() as usize, matrix })
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(matrix.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity(qubits: usize) -> Self {
        let d = 1usize << qubits;
        Self { qubits, matrix: DMatrix::identity(d, d) }
    }

    pub fn zeros(qubits: usize) -> Self {
        let d = 1usize << qubits;
        Self { qubits, matrix: DMatrix::zeros(d, d) }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { qubits: self.qubits, matrix: self.matrix.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Hilbert–Schmidt inner product tr(A†B).
    pub fn hs_inner(&self, other: &DenseOperator) -> C64 {
        self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Schatten p-norm; `p = f64::INFINITY` gives the spectral norm.
    pub fn schatten_norm(&self, p: f64) -> f64 {
        let s = self.singular_values();
        if p.is_infinite() {
            return s.first().copied().unwrap_or(0.0);
        }
        s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let s = self.singular_values();
        let top = s.first().copied().unwrap_or(0.0);
        s.iter().filter(|&&x| x > rel_tol * top).count()
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        Ok(Self { qubits: self.qubits, matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        Ok(Self { qubits: self.qubits, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        Ok(Self { qubits: self.qubits, matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, s: f64) -> DenseOperator {
        Self { qubits: self.qubits, matrix: &self.matrix * C64::new(s, 0.0) }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    fn check_same(&self, other: &DenseOperator) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::Dimension { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

fn check_dense(t: usize) -> Result<()> {
    if t > MAX_DENSE_QUBITS {
        return Err(Error::resource(format!("dense operators limited to {MAX_DENSE_QUBITS} qubits, got t = {t}")));
    }
    Ok(())
}

/// r(T) = Σ_{(x,y)∈T} |x⟩⟨y|.
pub fn r_of(lagrangian: &StochasticLagrangian) -> Result<DenseOperator> {
    let t = lagrangian.t();
    check_dense(t)?;
    let mut m = DMatrix::zeros(1 << t, 1 << t);
    for (x, y) in lagrangian.pairs() {
        m[(x as usize, y as usize)] = C64::new(1.0, 0.0);
    }
    Ok(DenseOperator { qubits: t, matrix: m })
}

/// Q_T = 2^{−t/2} r(T), normalized in Hilbert–Schmidt norm.
pub fn q_of(lagrangian: &StochasticLagrangian) -> Result<DenseOperator> {
    let r = r_of(lagrangian)?;
    Ok(r.scale((-(lagrangian.t() as f64) / 2.0).exp2()))
}

/// r(O) = r(T_O), the unitary permutation x ↦ Ox of basis states.
pub fn r_of_orthogonal(o: &StochasticOrthogonal) -> Result<DenseOperator> {
    r_of(&StochasticLagrangian::from_orthogonal(o))
}

/// Permutation of tensor factors sending qubit `i` to position `perm[i]`.
pub fn permutation_operator(perm: &[usize]) -> Result<DenseOperator> {
    r_of(&StochasticLagrangian::from_permutation(perm)?)
}

/// P_N = |N|^{−2} Σ_{p,q∈N} Z(p) X(q); the identity for N = {0}.
pub fn css_projector(n: &DefectSubspace) -> Result<DenseOperator> {
    let t = n.t();
    check_dense(t)?;
    let elems: Vec<u64> = n.space().elements().map(|v| v.bits()).collect();
    let norm = 1.0 / (elems.len() * elems.len()) as f64;
    let d = 1usize << t;
    let mut m = DMatrix::zeros(d, d);
    for x in 0..d as u64 {
        for &q in &elems {
            let target = x ^ q;
            // Z(p) X(q) |x⟩ = (−1)^{p·(x+q)} |x+q⟩
            let s: f64 = elems.iter().map(|&p| if (p & target).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).sum();
            m[(target as usize, x as usize)] += C64::new(s * norm, 0.0);
        }
    }
    Ok(DenseOperator { qubits: t, matrix: m })
}

/// Finds O ∈ O_t and the right defect N with r(T) = 2^{dim N} r(O) P_N.
pub fn decompose(lagrangian: &StochasticLagrangian) -> Result<Option<(StochasticOrthogonal, DefectSubspace)>> {
    let t = lagrangian.t();
    let (_, right) = lagrangian.defects();
    let r = r_of(lagrangian)?;
    let p = css_projector(&right)?;
    let scale = (right.dim() as f64).exp2();
    for o in enumerate_ot(t)? {
        let candidate = r_of_orthogonal(&o)?.mul(&p)?.scale(scale);
        if candidate.max_abs_diff(&r) <= 1e-10 {
            return Ok(Some((o, right)));
        }
    }
    Ok(None)
}

pub fn verify_decomposition(lagrangian: &StochasticLagrangian) -> bool {
    matches!(decompose(lagrangian), Ok(Some(_)))
}

/// P_D: keeps the entries |x⟩⟨y| with h(x) = h(y).
pub fn diag_apply(a: &DenseOperator) -> DenseOperator {
    let mut m = a.matrix.clone();
    for ((x, y), z) in m.iter_mut().enumerate().map(|(i, z)| ((i % a.dim(), i / a.dim()), z)) {
        if (x as u64).count_ones() != (y as u64).count_ones() {
            *z = C64::new(0.0, 0.0);
        }
    }
    DenseOperator { qubits: a.qubits, matrix: m }
}

/// All permutations of `0..t` in lexicographic order.
pub fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..t).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..t).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..t).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Orthogonal projection onto the commutant of U(2)^{⊗t}, the span of the t!
/// permutation operators.
///
/// The orthonormal basis is obtained from the eigendecomposition of the Gram
/// matrix of the vectorized permutations; eigenvalues below `1e−9·λ_max`
/// are dropped (the permutations are dependent once t > 2).
#[derive(Clone, Debug)]
pub struct HaarSymmetrizer {
    t: usize,
    /// Columns are orthonormal vectorized operators (column-major).
    basis: DMatrix<f64>,
}

impl HaarSymmetrizer {
    pub fn new(t: usize) -> Result<Self> {
        if t == 0 || t > MAX_HAAR_T {
            return Err(Error::resource(format!("Haar symmetrizer supports 1 ≤ t ≤ {MAX_HAAR_T}")));
        }
        let perms: Vec<StochasticLagrangian> =
            permutations(t).iter().map(|p| StochasticLagrangian::from_permutation(p)).collect::<Result<_>>()?;
        let m = perms.len();
        let gram = DMatrix::from_fn(m, m, |a, b| {
            let cap = perms[a].space().intersect(perms[b].space()).expect("same ambient");
            (cap.dim() as f64).exp2()
        });
        let eig = gram.symmetric_eigen();
        let top = eig.eigenvalues.max();
        let keep: Vec<usize> = (0..m).filter(|&k| eig.eigenvalues[k] > 1e-9 * top).collect();
        let d = 1usize << t;
        let mut basis = DMatrix::zeros(d * d, keep.len());
        for (col, &k) in keep.iter().enumerate() {
            let s = 1.0 / eig.eigenvalues[k].sqrt();
            for (a, p) in perms.iter().enumerate() {
                let c = eig.eigenvectors[(a, k)] * s;
                for (x, y) in p.pairs() {
                    basis[(x as usize + d * y as usize, col)] += c;
                }
            }
        }
        Ok(Self { t, basis })
    }

    /// Shared instance per t.
    pub fn shared(t: usize) -> Result<&'static HaarSymmetrizer> {
        static CACHE: [OnceLock<HaarSymmetrizer>; MAX_HAAR_T + 1] = [const { OnceLock::new() }; MAX_HAAR_T + 1];
        if t == 0 || t > MAX_HAAR_T {
            return Err(Error::resource(format!("Haar symmetrizer supports 1 ≤ t ≤ {MAX_HAAR_T}")));
        }
        if let Some(h) = CACHE[t].get() {
            return Ok(h);
        }
        let h = HaarSymmetrizer::new(t)?;
        Ok(CACHE[t].get_or_init(|| h))
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Dimension of the commutant of U(2)^{⊗t}.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis as columns of vectorized (column-major) operators.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn apply(&self, a: &DenseOperator) -> Result<DenseOperator> {
        if a.qubits() != self.t {
            return Err(Error::Dimension { expected: 1 << self.t, found: a.dim() });
        }
        let d = a.dim();
        let coeffs: Vec<C64> = (0..self.rank())
            .map(|k| self.basis.column(k).iter().zip(a.matrix.iter()).map(|(&b, &z)| z * b).sum())
            .collect();
        let mut m = DMatrix::zeros(d, d);
        for (k, c) in coeffs.iter().enumerate() {
            for (z, &b) in m.iter_mut().zip(self.basis.column(k).iter()) {
                *z += c * b;
            }
        }
        Ok(DenseOperator { qubits: self.t, matrix: m })
    }

    /// Coordinates of Q_T in the orthonormal basis (real since r(T) is real).
    pub fn coordinates(&self, lagrangian: &StochasticLagrangian) -> Result<DVector<f64>> {
        if lagrangian.t() != self.t {
            return Err(Error::Dimension { expected: self.t, found: lagrangian.t() });
        }
        let d = 1usize << self.t;
        let norm = (-(self.t as f64) / 2.0).exp2();
        let mut out = DVector::zeros(self.rank());
        for (x, y) in lagrangian.pairs() {
            let row = self.basis.row(x as usize + d * y as usize);
            for k in 0..self.rank() {
                out[k] += row[k] * norm;
            }
        }
        Ok(out)
    }

    /// ⟨Q_T|P_H|Q_T′⟩.
    pub fn sandwich(&self, a: &StochasticLagrangian, b: &StochasticLagrangian) -> Result<f64> {
        Ok(self.coordinates(a)?.dot(&self.coordinates(b)?))
    }
}

pub fn haar_apply(t: usize, a: &DenseOperator) -> Result<DenseOperator> {
    HaarSymmetrizer::shared(t)?.apply(a)
}

/// ⟨Q_T|P_H|Q_T⟩ = 2^{−t} ‖P_H[r(T)]‖₂².
pub fn haar_overlap(lagrangian: &StochasticLagrangian) -> Result<f64> {
    let h = HaarSymmetrizer::shared(lagrangian.t())?;
    Ok(h.coordinates(lagrangian)?.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{all_ones_defect, anti_identity, sigma};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    fn random_operator(qubits: usize, seed: u64) -> DenseOperator {
        let d = 1 << qubits;
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        DenseOperator::from_matrix(DMatrix::from_fn(d, d, |_, _| C64::new(next(), next()))).unwrap()
    }

    fn t4_defect_element() -> StochasticLagrangian {
        StochasticLagrangian::diagonal_defect(&all_ones_defect(4).unwrap()).unwrap()
    }

    #[test]
    fn r_of_identity_and_permutation() {
        let id = r_of(&StochasticLagrangian::identity(3)).unwrap();
        assert_eq!(id, DenseOperator::identity(3));

        // perm sends qubit 0 to position 1, qubit 1 to 2, qubit 2 to 0
        let p = r_of(&StochasticLagrangian::from_permutation(&[1, 2, 0]).unwrap()).unwrap();
        // |x0 x1 x2⟩ = |1 0 0⟩ (index 1) maps to |0 1 0⟩ (index 2)
        assert_eq!(p.matrix()[(2, 1)], C64::new(1.0, 0.0));
        assert!(p.mul(&p.adjoint()).unwrap().max_abs_diff(&DenseOperator::identity(3)) < 1e-15);
    }

    #[test]
    fn r_of_rejects_large_t() {
        let big = StochasticLagrangian::identity(13);
        assert!(matches!(r_of(&big), Err(Error::Resource(_))));
    }

    #[test]
    fn schatten_norms_match_defect_dimension() {
        for t in 1..=5 {
            for s in sigma(t).unwrap() {
                let r = r_of(s).unwrap();
                let k = s.left_defect_dim() as f64;
                let tf = t as f64;
                let sv = r.singular_values();
                let trace_norm: f64 = sv.iter().sum();
                let two: f64 = sv.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(close(trace_norm, (tf - k).exp2(), 1e-10));
                assert!(close(two, (tf / 2.0).exp2(), 1e-10));
                assert!(close(sv[0], k.exp2(), 1e-10));
                assert_eq!(r.rank(1e-9), 1 << (t - 2 * s.left_defect_dim()));
                let ones = r.matrix().iter().filter(|z| z.re == 1.0).count();
                assert_eq!(ones, 1 << t);
            }
        }
    }

    #[test]
    fn q_normalization() {
        for s in sigma(4).unwrap() {
            let q = q_of(s).unwrap();
            assert!((q.frobenius_norm() - 1.0).abs() < 1e-12);
            assert!((q.hs_inner(&q).re - 1.0).abs() < 1e-12);
        }
        let q = q_of(&StochasticLagrangian::identity(2)).unwrap();
        assert!(q.max_abs_diff(&DenseOperator::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn css_projector_properties() {
        assert_eq!(css_projector(&DefectSubspace::trivial(3)).unwrap(), DenseOperator::identity(3));
        let p = css_projector(&all_ones_defect(4).unwrap()).unwrap();
        assert!((p.trace().re - 4.0).abs() < 1e-12);
        assert!(p.mul(&p).unwrap().max_abs_diff(&p) < 1e-12);
        assert!(p.is_hermitian(1e-14));
        let n8 = all_ones_defect(8).unwrap();
        let p8 = css_projector(&n8).unwrap();
        assert!((p8.trace().re - 64.0).abs() < 1e-10);
    }

    #[test]
    fn decomposition_exists_for_all_t4_and_anti_identity() {
        for s in sigma(4).unwrap() {
            let (o, n) = decompose(s).unwrap().expect("decomposition");
            assert_eq!(n.dim(), s.right_defect_dim());
            if s.is_permutation() {
                assert_eq!(&StochasticLagrangian::from_orthogonal(&o), s);
            }
        }
        let defect = t4_defect_element();
        let (o, n) = decompose(&defect).unwrap().unwrap();
        assert!(o.is_permutation());
        assert_eq!(n, all_ones_defect(4).unwrap());

        let anti = anti_identity(6).unwrap();
        let t_anti = StochasticLagrangian::from_orthogonal(&anti);
        let (o, n) = decompose(&t_anti).unwrap().unwrap();
        assert_eq!(o, anti);
        assert_eq!(n.dim(), 0);
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
    }

    #[test]
    fn haar_symmetrizer_ranks() {
        // dimension of the commutant of U(2)^{⊗t}: Catalan numbers
        let catalan = [1, 2, 5, 14, 42];
        for t in 1..=5 {
            assert_eq!(HaarSymmetrizer::shared(t).unwrap().rank(), catalan[t - 1]);
        }
    }

    #[test]
    fn haar_apply_is_projector_preserving_trace() {
        for t in 2..=4 {
            let a = random_operator(t, 17 + t as u64);
            let pa = haar_apply(t, &a).unwrap();
            let ppa = haar_apply(t, &pa).unwrap();
            assert!(ppa.sub(&pa).unwrap().frobenius_norm() <= 1e-10);
            assert!((pa.trace() - a.trace()).norm() < 1e-10);
            // P_H ∘ P_D = P_H and P_D ∘ P_H = P_H
            let pd = haar_apply(t, &diag_apply(&a)).unwrap();
            assert!(pd.sub(&pa).unwrap().frobenius_norm() < 1e-10);
            assert!(diag_apply(&pa).sub(&pa).unwrap().frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn haar_apply_fixes_permutations() {
        for perm in permutations(4) {
            let p = permutation_operator(&perm).unwrap();
            assert!(haar_apply(4, &p).unwrap().max_abs_diff(&p) < 1e-10);
        }
    }

    #[test]
    fn haar_overlap_values() {
        for t in 1..=5 {
            for s in sigma(t).unwrap() {
                let v = haar_overlap(s).unwrap();
                assert!((-1e-12..=1.0 + 1e-12).contains(&v));
                if s.is_permutation() {
                    assert!((v - 1.0).abs() < 1e-10);
                } else {
                    assert!(v <= 0.875 + 1e-12, "t={t} overlap {v}");
                }
                // diagonal bound: 2^{-t}‖P_H r‖² ≤ 2^{-t}‖P_D r‖²
                let q = q_of(s).unwrap();
                let pd = diag_apply(&q).frobenius_norm().powi(2);
                assert!(v <= pd + 1e-12);
            }
        }
    }

    #[test]
    fn anti_identity_haar_overlap() {
        let t_anti = StochasticLagrangian::from_orthogonal(&anti_identity(6).unwrap());
        let v = haar_overlap(&t_anti).unwrap();
        assert!((v - 4.0 / 7.0).abs() < 1e-10, "{v}");
        // dense route through haar_apply agrees
        let r = r_of(&t_anti).unwrap();
        let dense = haar_apply(6, &r).unwrap().frobenius_norm().powi(2) / 64.0;
        assert!((dense - 4.0 / 7.0).abs() < 1e-10);
    }

    #[test]
    fn css_haar_value_at_t4() {
        let n = all_ones_defect(4).unwrap();
        let p = css_projector(&n).unwrap();
        let ph = haar_apply(4, &p).unwrap();
        let v = (2f64).powi(-4 + 2) * p.hs_inner(&ph).re;
        assert!((v - 0.7).abs() < 1e-10, "{v}");
    }

    #[test]
    fn overlap_identity_by_brute_force() {
        for t in 2..=4 {
            let s = sigma(t).unwrap();
            for a in s {
                for b in s {
                    let dense = q_of(a).unwrap().hs_inner(&q_of(b).unwrap()).re;
                    let cap = a.space().intersect(b.space()).unwrap().dim() as i32;
                    assert!((dense - (cap - t as i32).into_f64_exp2()).abs() < 1e-12);
                }
            }
        }
    }

    trait Exp2 {
        fn into_f64_exp2(self) -> f64;
    }
    impl Exp2 for i32 {
        fn into_f64_exp2(self) -> f64 {
            (self as f64).exp2()
        }
    }
}
