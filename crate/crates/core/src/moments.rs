//! Moment operators of K-interleaved Clifford circuits computed in the
//! |Σ_{t,t}|-dimensional coordinates of the Clifford commutant.
//!
//! The distance ‖[(P_Cl − P_H) R(K)]^k‖₂ is evaluated from the single-site
//! matrix elements ⟨Q_T|R₁|Q_{T′}⟩ and the overlaps ⟨Q_T|Q_{T′}⟩^{n−1};
//! nothing of dimension 2^{nt} is ever formed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::commutant::{gram, CommutantModel};
use crate::error::{Error, Result};
use crate::lagrangian::{sigma, StochasticLagrangian};
use crate::operators::{HaarSymmetrizer, C64};

const UNITARY_TOL: f64 = 1e-12;

/// Largest t for which single-site matrix elements are evaluated.
pub const MAX_MOMENT_T: usize = 10;

/// A single-qubit unitary injected between Clifford layers.
#[derive(Clone, Debug, PartialEq)]
pub struct GateK {
    matrix: DMatrix<C64>,
    label: String,
}

impl GateK {
    /// `entries` in row-major order.
    pub fn new(entries: [C64; 4], label: impl Into<String>) -> Result<Self> {
        let matrix = DMatrix::from_row_slice(2, 2, &entries);
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("gate has non-finite entries"));
        }
        let defect =
            (&matrix * matrix.adjoint() - DMatrix::<C64>::identity(2, 2)).iter().fold(0f64, |a, z| a.max(z.norm()));
        if defect > UNITARY_TOL {
            return Err(Error::arg(format!("gate is not unitary (deviation {defect:.3e})")));
        }
        Ok(Self { matrix, label: label.into() })
    }

    /// Eight floats: (re, im) of the entries in row-major order.
    pub fn from_floats(v: &[f64]) -> Result<Self> {
        if v.len() != 8 {
            return Err(Error::arg(format!("custom gate needs 8 floats, got {}", v.len())));
        }
        let e = |i: usize| C64::new(v[2 * i], v[2 * i + 1]);
        Self::new([e(0), e(1), e(2), e(3)], "custom")
    }

    pub fn phase(angle: f64, label: &str) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new([one, zero, zero, Complex64::from_polar(1.0, angle)], label).expect("unitary")
    }

    pub fn identity() -> Self {
        Self::phase(0.0, "I")
    }

    pub fn t_gate() -> Self {
        Self::phase(std::f64::consts::FRAC_PI_4, "T")
    }

    pub fn sqrt_t() -> Self {
        Self::phase(std::f64::consts::FRAC_PI_8, "sqrtT")
    }

    pub fn s_gate() -> Self {
        Self::phase(std::f64::consts::FRAC_PI_2, "S")
    }

    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new([h, h, h, -h], "H").expect("unitary")
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), label: format!("{}^dag", self.label) }
    }

    /// True when K maps X and Z to Paulis up to phase under conjugation.
    pub fn is_clifford(&self) -> bool {
        let paulis = pauli_matrices();
        let k = &self.matrix;
        [&paulis[1], &paulis[3]].iter().all(|p| {
            let image = k * *p * k.adjoint();
            paulis[1..].iter().any(|q| (q.adjoint() * &image).trace().norm() > 2.0 - 1e-9)
        })
    }
}

/// I, X, Y, Z.
pub fn pauli_matrices() -> [DMatrix<C64>; 4] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// U^{⊗t} as a dense 2^t × 2^t matrix, qubit `i` on bit `i` of the index.
pub fn tensor_power(u: &DMatrix<C64>, t: usize) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for _ in 0..t {
        // new qubit becomes the most significant bit
        out = u.kronecker(&out);
    }
    out
}

/// Which single-site channel sits between Clifford layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    /// ⅓(Ad_K + Ad_{K†} + id).
    Standard,
    /// ½(Ad_K + Ad_{K†}).
    NoIdentity,
    /// The single-qubit Haar twirl P_H.
    Haar,
}

/// Channel as a weighted sum of unitary conjugations.
type Terms = Vec<(f64, DMatrix<C64>)>;

/// Weighted unitary decomposition of the single-site channel and of its
/// square (the channel is self-adjoint, so R R† = R²).
fn channel_terms(gate: &GateK, kind: ChannelKind) -> (Terms, Terms) {
    let k = gate.matrix().clone();
    let kd = k.adjoint();
    let id = DMatrix::identity(2, 2);
    match kind {
        ChannelKind::Standard => (
            vec![(1.0 / 3.0, k.clone()), (1.0 / 3.0, kd.clone()), (1.0 / 3.0, id.clone())],
            vec![(1.0 / 9.0, &k * &k), (1.0 / 9.0, &kd * &kd), (3.0 / 9.0, id), (2.0 / 9.0, k), (2.0 / 9.0, kd)],
        ),
        ChannelKind::NoIdentity => {
            (vec![(0.5, k.clone()), (0.5, kd.clone())], vec![(0.25, &k * &k), (0.25, &kd * &kd), (0.5, id)])
        }
        ChannelKind::Haar => unreachable!("Haar channel has no unitary decomposition here"),
    }
}

/// 2^{−t} Σ_{(x,y)∈T} B[x,y] = 2^{−t} tr(r(T)† B).
fn trace_against(lagrangian: &StochasticLagrangian, b: &DMatrix<C64>) -> C64 {
    let s: C64 = lagrangian.pairs().map(|(x, y)| b[(x as usize, y as usize)]).sum();
    s * (-(lagrangian.t() as f64)).exp2()
}

/// U^{⊗t} r(T′) U^{†⊗t} using the sparsity of r(T′).
fn conjugated(ut: &DMatrix<C64>, lagrangian: &StochasticLagrangian) -> DMatrix<C64> {
    let d = ut.nrows();
    let mut ur = DMatrix::<C64>::zeros(d, d);
    for (x, y) in lagrangian.pairs() {
        let col = ut.column(x as usize).clone_owned();
        ur.column_mut(y as usize).zip_apply(&col, |a: &mut C64, b| *a += b);
    }
    ur * ut.adjoint()
}

fn check_t(t: usize) -> Result<()> {
    if t == 0 || t > MAX_MOMENT_T {
        return Err(Error::resource(format!("matrix elements need 1 ≤ t ≤ {MAX_MOMENT_T}, got {t}")));
    }
    Ok(())
}

/// ⅓⟨Q_T|Ad_K^{⊗t} + Ad_{K†}^{⊗t} + id|Q_{T′}⟩.
pub fn r_matrix_element(gate: &GateK, a: &StochasticLagrangian, b: &StochasticLagrangian) -> Result<C64> {
    if a.t() != b.t() {
        return Err(Error::Dimension { expected: a.t(), found: b.t() });
    }
    check_t(a.t())?;
    let (terms, _) = channel_terms(gate, ChannelKind::Standard);
    Ok(terms.iter().map(|(w, u)| trace_against(a, &conjugated(&tensor_power(u, a.t()), b)) * *w).sum())
}

/// Matrix of ⟨Q_T|Σ_w w Ad_U^{⊗t}|Q_{T′}⟩ over a list of spaces.
fn single_site_matrix(t: usize, spaces: &[StochasticLagrangian], terms: &[(f64, DMatrix<C64>)]) -> DMatrix<C64> {
    let m = spaces.len();
    let mut out = DMatrix::zeros(m, m);
    for (w, u) in terms {
        let ut = tensor_power(u, t);
        for (j, b) in spaces.iter().enumerate() {
            let conj = conjugated(&ut, b);
            for (i, a) in spaces.iter().enumerate() {
                out[(i, j)] += trace_against(a, &conj) * *w;
            }
        }
    }
    out
}

fn haar_single_site_matrix(t: usize, spaces: &[StochasticLagrangian]) -> Result<DMatrix<C64>> {
    let h = HaarSymmetrizer::shared(t)?;
    let coords: Vec<DVector<f64>> = spaces.iter().map(|s| h.coordinates(s)).collect::<Result<_>>()?;
    let m = spaces.len();
    Ok(DMatrix::from_fn(m, m, |i, j| C64::new(coords[i].dot(&coords[j]), 0.0)))
}

/// η_{K,t}: max over non-permutation T and all T′ of |⟨Q_T|R₁(K)|Q_{T′}⟩|.
/// Returns 0 when Σ_{t,t} has no non-permutation element (t ≤ 3).
pub fn eta(t: usize, gate: &GateK) -> Result<f64> {
    let spaces = sigma(t)?;
    let (terms, _) = channel_terms(gate, ChannelKind::Standard);
    let m1 = single_site_matrix(t, spaces, &terms);
    let p = spaces.iter().take_while(|s| s.is_permutation()).count();
    let mut best = 0f64;
    for i in p..spaces.len() {
        for j in 0..spaces.len() {
            best = best.max(m1[(i, j)].norm());
        }
    }
    Ok(best)
}

/// The restriction of R to range(P_Cl − P_H), in an orthonormal basis.
#[derive(Clone, Debug)]
pub struct InterleavedModel {
    t: usize,
    n: usize,
    kind: ChannelKind,
    gate: Option<GateK>,
    commutant: CommutantModel,
    m_r: DMatrix<C64>,
    m_rr: DMatrix<C64>,
    w: DMatrix<f64>,
    m: DMatrix<C64>,
    g: DMatrix<C64>,
}

impl InterleavedModel {
    /// `gate` is ignored (and may be `None`) for [`ChannelKind::Haar`].
    pub fn new(t: usize, n: usize, gate: Option<&GateK>, kind: ChannelKind) -> Result<Self> {
        check_t(t)?;
        let commutant = gram(t, n)?;
        commutant.check_conditioning()?;
        let spaces = commutant.sigma();
        let (r1, rr1) = match kind {
            ChannelKind::Haar => {
                let h = haar_single_site_matrix(t, spaces)?;
                (h.clone(), h)
            }
            _ => {
                let gate = gate.ok_or_else(|| Error::arg("interleaved model needs a gate"))?;
                let (terms, squared) = channel_terms(gate, kind);
                (single_site_matrix(t, spaces, &terms), single_site_matrix(t, spaces, &squared))
            }
        };
        let size = spaces.len();
        let lift = |single: &DMatrix<C64>| {
            DMatrix::from_fn(size, size, |i, j| {
                let g = f64::from(commutant.gram_log2(i, j)) * (n - 1) as f64;
                single[(i, j)] * g.exp2()
            })
        };
        let m_r = lift(&r1);
        let m_rr = lift(&rr1);
        let w = complement_basis(&commutant)?;
        let wc = w.map(|x| C64::new(x, 0.0));
        let m = wc.transpose() * &m_r * &wc;
        let g = wc.transpose() * &m_rr * &wc;
        let gate = match kind {
            ChannelKind::Haar => None,
            _ => gate.cloned(),
        };
        Ok(Self { t, n, kind, gate, commutant, m_r, m_rr, w, m, g })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn gate(&self) -> Option<&GateK> {
        self.gate.as_ref()
    }

    pub fn commutant(&self) -> &CommutantModel {
        &self.commutant
    }

    /// ⟨Q_T^{⊗n}|R|Q_{T′}^{⊗n}⟩.
    pub fn r_elements(&self) -> &DMatrix<C64> {
        &self.m_r
    }

    /// ⟨Q_T^{⊗n}|R R†|Q_{T′}^{⊗n}⟩.
    pub fn rr_elements(&self) -> &DMatrix<C64> {
        &self.m_rr
    }

    /// Orthonormal basis of range(P_Cl − P_H) in Q-coordinates (columns).
    pub fn complement_basis(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// ⟨w_a|R|w_b⟩.
    pub fn restricted(&self) -> &DMatrix<C64> {
        &self.m
    }

    /// ⟨w_a|R R†|w_b⟩.
    pub fn restricted_square(&self) -> &DMatrix<C64> {
        &self.g
    }

    /// dim range(P_Cl − P_H) = |Σ_{t,t}| − t!.
    pub fn complement_dim(&self) -> usize {
        self.w.ncols()
    }

    /// ‖M − M†‖_∞ entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.m - self.m.adjoint()).map(|z| z.norm()).max()
    }

    /// ‖[(P_Cl − P_H) R]^k‖₂. For k = 0 this is ‖P_Cl − P_H‖₂, the distance
    /// of the bare Clifford group.
    pub fn convergence_norm(&self, k: usize) -> f64 {
        self.convergence_norms(k)[k]
    }

    /// Values of [`Self::convergence_norm`] for k = 0..=k_max.
    pub fn convergence_norms(&self, k_max: usize) -> Vec<f64> {
        let d = self.complement_dim();
        let mut out = vec![(d as f64).sqrt()];
        let mut power = DMatrix::<C64>::identity(d, d);
        for k in 1..=k_max {
            if k > 1 {
                power = &power * &self.m;
            }
            let v = (&power * &self.g * power.adjoint()).trace().re;
            out.push(v.max(0.0).sqrt());
        }
        out
    }

    /// ‖[(P_Cl − P_H) R (P_Cl − P_H)]^k‖₂ = sqrt(tr(M^k M^{†k})): the distance
    /// for circuits that start and end with a Clifford layer.
    pub fn sandwiched_norms(&self, k_max: usize) -> Vec<f64> {
        let d = self.complement_dim();
        let mut power = DMatrix::<C64>::identity(d, d);
        let mut out = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            if k > 0 {
                power = &power * &self.m;
            }
            out.push(power.map(|z| z.norm_sqr()).sum().sqrt());
        }
        out
    }

    /// Largest singular value of M.
    pub fn spectral_contraction(&self) -> f64 {
        if self.complement_dim() == 0 {
            return 0.0;
        }
        self.m.clone().singular_values().max()
    }

    /// Largest modulus among eigenvalues of the Hermitian part of M.
    pub fn spectral_radius(&self) -> f64 {
        if self.complement_dim() == 0 {
            return 0.0;
        }
        let herm = (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigen().eigenvalues.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// Orthonormal basis (in the Gram metric) of the complement of the
/// permutation block: F = [e_j − Γ_pp^{−1}Γ_{p,j}] for non-permutation j,
/// then W = F V Λ^{−1/2} from FᵀΓF = VΛVᵀ.
fn complement_basis(model: &CommutantModel) -> Result<DMatrix<f64>> {
    let m = model.size();
    let p = model.perm_count();
    let q = m - p;
    if q == 0 {
        return Ok(DMatrix::zeros(m, 0));
    }
    let g = model.gram();
    let chol = g
        .view((0, 0), (p, p))
        .clone_owned()
        .cholesky()
        .ok_or_else(|| Error::conditioning("permutation Gram block is not positive definite"))?;
    let proj = chol.solve(&g.view((0, p), (p, q)).clone_owned());
    let mut f = DMatrix::zeros(m, q);
    f.view_mut((0, 0), (p, q)).copy_from(&(-proj));
    for j in 0..q {
        f[(p + j, j)] = 1.0;
    }
    let s = f.transpose() * g * &f;
    let eig = s.symmetric_eigen();
    let top = eig.eigenvalues.max();
    let low = eig.eigenvalues.min();
    if low < 1e-12 * top {
        return Err(Error::conditioning(format!("complement metric has eigenvalue ratio {:.3e}", low / top)));
    }
    let scale = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()));
    Ok(f * eig.eigenvectors * scale)
}

/// ‖[(P_Cl − P_H) P_H^{(1)}]^k‖₂ for Haar-random single-qubit injections.
pub fn haar_interleaved_norm(t: usize, n: usize, k: usize) -> Result<f64> {
    Ok(InterleavedModel::new(t, n, None, ChannelKind::Haar)?.convergence_norm(k))
}

/// log₂(1 + 2^x) without overflow.
fn log2_one_plus_exp2(x: f64) -> f64 {
    if x > 60.0 {
        x + (-x).exp2().ln_1p() / std::f64::consts::LN_2
    } else {
        x.exp2().ln_1p() / std::f64::consts::LN_2
    }
}

/// log₂ of 2^{33t⁴ + t log₂ k} (1 + 2^{32t² − n})^{5k} η̄^{k−1}.
pub fn depth_bound_log2(t: usize, n: usize, k: f64, eta_bar: f64) -> Result<f64> {
    if t == 0 || k < 1.0 || !(eta_bar > 0.0 && eta_bar <= 1.0) {
        return Err(Error::arg("need t ≥ 1, k ≥ 1 and 0 < η̄ ≤ 1"));
    }
    let t = t as f64;
    let x = 32.0 * t * t - n as f64;
    Ok(33.0 * t.powi(4) + t * k.log2() + 5.0 * k * log2_one_plus_exp2(x) + (k - 1.0) * eta_bar.log2())
}

/// Depth 36(33t⁴ + 3t log₂(1/ε)) sufficient for Haar-interleaved circuits.
pub fn haar_interleaved_depth(t: usize, eps: f64) -> f64 {
    let t = t as f64;
    36.0 * (33.0 * t.powi(4) + 3.0 * t * (1.0 / eps).log2())
}

/// Superoperator of X ↦ U X U† on column-stacked vectors: Ū ⊗ U.
pub fn conjugation_superop(u: &DMatrix<C64>) -> DMatrix<C64> {
    u.map(|z| z.conj()).kronecker(u)
}

/// Choi matrix Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|) of a column-stacked superoperator.
pub fn choi(superop: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let big = superop.nrows();
    let d = (big as f64).sqrt().round() as usize;
    if d * d != big || superop.ncols() != big {
        return Err(Error::arg("superoperator must be square with square dimension"));
    }
    Ok(DMatrix::from_fn(big, big, |r, c| {
        let (i, a) = (r / d, r % d);
        let (j, b) = (c / d, c % d);
        superop[(a + d * b, i + d * j)]
    }))
}

/// Largest superoperator dimension accepted by the Choi check (4⁶).
pub const MAX_CHOI_DIM: usize = 4096;

/// True iff (1+ε)B − A and A − (1−ε)B are completely positive, i.e. both
/// Choi matrices have smallest eigenvalue ≥ −1e−9.
pub fn relative_design_check(a: &DMatrix<C64>, b: &DMatrix<C64>, eps: f64) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension { expected: a.nrows(), found: b.nrows() });
    }
    if a.nrows() > MAX_CHOI_DIM {
        return Err(Error::resource(format!("Choi check limited to dimension {MAX_CHOI_DIM}")));
    }
    let upper = b * C64::new(1.0 + eps, 0.0) - a;
    let lower = a - b * C64::new(1.0 - eps, 0.0);
    for op in [upper, lower] {
        let j = choi(&op)?;
        let herm = (&j + j.adjoint()) * C64::new(0.5, 0.0);
        let min = herm.symmetric_eigen().eigenvalues.min();
        if min < -1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutant::gram_schmidt_cofactors;
    use crate::lagrangian::all_ones_defect;
    use crate::operators::{q_of, DenseOperator};

    #[test]
    fn gate_validation() {
        assert!(!GateK::t_gate().is_clifford());
        assert!(GateK::s_gate().is_clifford());
        assert!(GateK::hadamard().is_clifford());
        assert!(GateK::identity().is_clifford());
        assert!(!GateK::sqrt_t().is_clifford());
        assert!(GateK::from_floats(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0]).is_err());
        assert!(GateK::from_floats(&[1.0; 7]).is_err());
    }

    #[test]
    fn tensor_power_layout() {
        // X on every qubit flips all bits
        let x = &pauli_matrices()[1];
        let x3 = tensor_power(x, 3);
        assert_eq!(x3[(7, 0)], C64::new(1.0, 0.0));
        let z = &pauli_matrices()[3];
        let zx = z.kronecker(x);
        // qubit 0 = x factor (low bit), qubit 1 = z factor
        assert_eq!(zx[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(zx[(3, 2)], C64::new(-1.0, 0.0));
    }

    #[test]
    fn identity_gate_reduces_to_overlap() {
        let s = sigma(3).unwrap();
        for a in s {
            for b in s {
                let v = r_matrix_element(&GateK::identity(), a, b).unwrap();
                let o = q_of(a).unwrap().hs_inner(&q_of(b).unwrap());
                assert!((v - o).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn clifford_diagonal_is_one() {
        for s in sigma(4).unwrap() {
            let v = r_matrix_element(&GateK::s_gate(), s, s).unwrap();
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn t_gate_shrinks_defect_element() {
        let n = all_ones_defect(4).unwrap();
        let d = StochasticLagrangian::diagonal_defect(&n).unwrap();
        let v = r_matrix_element(&GateK::t_gate(), &d, &d).unwrap();
        assert!(v.norm() < 1.0 - 1e-6, "{v}");
        // dense cross-check
        let k4 = tensor_power(GateK::t_gate().matrix(), 4);
        let q = q_of(&d).unwrap();
        let kq = DenseOperator::from_matrix(&k4 * q.matrix() * k4.adjoint()).unwrap();
        let kdq = DenseOperator::from_matrix(k4.adjoint() * q.matrix() * &k4).unwrap();
        let dense = (q.hs_inner(&kq) + q.hs_inner(&kdq) + q.hs_inner(&q)) / 3.0;
        assert!((dense - v).norm() < 1e-12);
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(3, &GateK::t_gate()).unwrap(), 0.0);
        assert!((eta(4, &GateK::s_gate()).unwrap() - 1.0).abs() < 1e-12);
        let e = eta(4, &GateK::t_gate()).unwrap();
        assert!(e > 0.0 && e < 1.0, "{e}");
        let ed = eta(4, &GateK::t_gate().adjoint()).unwrap();
        assert!((e - ed).abs() < 1e-12);
    }

    #[test]
    fn design_at_t3_means_zero_distance() {
        let model = InterleavedModel::new(3, 4, Some(&GateK::t_gate()), ChannelKind::Standard).unwrap();
        assert_eq!(model.complement_dim(), 0);
        assert!(model.convergence_norms(5).iter().all(|&x| x == 0.0));
        assert_eq!(haar_interleaved_norm(3, 2, 3).unwrap(), 0.0);
    }

    #[test]
    fn t_gate_model_contracts() {
        let model = InterleavedModel::new(4, 8, Some(&GateK::t_gate()), ChannelKind::Standard).unwrap();
        assert!(model.hermiticity_defect() < 1e-10);
        assert_eq!(model.complement_dim(), 6);
        let norms = model.convergence_norms(60);
        assert!(norms.windows(2).skip(1).all(|w| w[1] < w[0]));
        // the spectrum of M is nearly degenerate at n = 8, so successive
        // ratios creep up on the contraction from below
        let c = model.spectral_contraction();
        let ratios: Vec<f64> = (2..=60).map(|k| norms[k] / norms[k - 1]).collect();
        assert!(ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(ratios.iter().all(|&r| r < c));
        assert!(c <= eta(4, &GateK::t_gate()).unwrap() * 1.01);
    }

    #[test]
    fn ratio_reaches_contraction_with_a_clear_gap() {
        let model = InterleavedModel::new(4, 3, Some(&GateK::t_gate()), ChannelKind::Standard).unwrap();
        let norms = model.convergence_norms(200);
        let ratio = norms[200] / norms[199];
        assert!((ratio - model.spectral_contraction()).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn clifford_gate_makes_no_progress() {
        let model = InterleavedModel::new(4, 6, Some(&GateK::s_gate()), ChannelKind::Standard).unwrap();
        let norms = model.convergence_norms(5);
        for k in 1..=5 {
            assert!((norms[k] - norms[0]).abs() < 1e-9, "{norms:?}");
        }
        assert!((model.spectral_contraction() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthonormal_bases_agree() {
        // W from Gram–Schmidt columns versus the spectral construction
        let model = InterleavedModel::new(4, 6, Some(&GateK::t_gate()), ChannelKind::Standard).unwrap();
        let gs = gram_schmidt_cofactors(model.commutant()).unwrap();
        let p = model.commutant().perm_count();
        let m = model.commutant().size();
        let mut w2 = DMatrix::zeros(m, m - p);
        for (c, j) in (p..m).enumerate() {
            let s = 1.0 / gs.squared_norms[j].sqrt();
            w2.set_column(c, &(gs.coefficients.column(j) * s));
        }
        let w2c = w2.map(|x| C64::new(x, 0.0));
        let m2 = w2c.transpose() * model.r_elements() * &w2c;
        let s1 = model.restricted().clone().singular_values();
        let s2 = m2.singular_values();
        let mut a: Vec<f64> = s1.iter().copied().collect();
        let mut b: Vec<f64> = s2.iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn haar_variant_and_no_identity() {
        let model = InterleavedModel::new(4, 6, None, ChannelKind::Haar).unwrap();
        let norms = model.convergence_norms(4);
        assert!(norms[1] < norms[0]);
        assert!(model.spectral_contraction() <= 0.875 + 1e-9);
        let ni = InterleavedModel::new(4, 6, Some(&GateK::t_gate()), ChannelKind::NoIdentity).unwrap();
        assert!(ni.hermiticity_defect() < 1e-10);
        assert!(ni.spectral_contraction() < 1.0);
    }

    #[test]
    fn depth_bound_arithmetic() {
        let b = depth_bound_log2(4, 600, 1e5, 0.25).unwrap();
        assert!(b < 0.0, "{b}");
        assert!(depth_bound_log2(4, 300, 1e5, 0.25).unwrap() > 0.0);
        assert!(depth_bound_log2(2, 100, 10.0, 1.0).unwrap() >= 33.0 * 16.0);
        for t in 1..=6 {
            for eps in [1e-2, 1e-6, 1e-12] {
                let k = haar_interleaved_depth(t, eps);
                let n = 32 * t * t + 7;
                let b = depth_bound_log2(t, n, k, 0.875).unwrap();
                assert!(b <= eps.log2(), "t={t} eps={eps} b={b}");
            }
        }
        assert!((0.875f64).log2() <= -0.19);
    }

    #[test]
    fn choi_checks() {
        let id = DMatrix::<C64>::identity(4, 4);
        assert!(relative_design_check(&id, &id, 0.0).unwrap());
        // completely depolarizing channel on one qubit: X ↦ tr(X) 𝟙/2
        let mut dep = DMatrix::<C64>::zeros(4, 4);
        for a in [0usize, 3] {
            for i in [0usize, 3] {
                dep[(a, i)] = C64::new(0.5, 0.0);
            }
        }
        assert!(!relative_design_check(&dep, &id, 0.0).unwrap());
        let h = conjugation_superop(GateK::hadamard().matrix());
        let j = choi(&h).unwrap();
        assert!((j.trace().re - 2.0).abs() < 1e-12);
    }
}
