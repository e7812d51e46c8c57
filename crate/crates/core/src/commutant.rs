//! Gram-matrix algebra of the tensor-power family {Q_T^{⊗n} : T ∈ Σ_{t,t}}
//! spanning the commutant of the n-qubit Clifford group.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lagrangian::{sigma, StochasticLagrangian, MAX_SIGMA_T};

/// Relative eigenvalue floor below which a Gram matrix is treated as singular.
pub const CONDITIONING_FLOOR: f64 = 1e-12;

/// log₂⟨Q_{T₁}|Q_{T₂}⟩ = dim(T₁ ∩ T₂) − t.
pub fn overlap_exact(a: &StochasticLagrangian, b: &StochasticLagrangian) -> Result<i32> {
    if a.t() != b.t() {
        return Err(Error::Dimension { expected: a.t(), found: b.t() });
    }
    let cap = a.space().intersect(b.space())?;
    Ok(cap.dim() as i32 - a.t() as i32)
}

/// (−2^{−k}; 2)_{t−1} = ∏_{r=0}^{t−2} (1 + 2^{r−k}).
pub fn pochhammer_s(t: usize, k: f64) -> f64 {
    (0..t.saturating_sub(1)).map(|r| 1.0 + (r as f64 - k).exp2()).product()
}

#[derive(Clone, Debug)]
pub struct CommutantModel {
    t: usize,
    n: usize,
    sigma: &'static [StochasticLagrangian],
    gram_log2: Vec<i32>,
    gram: DMatrix<f64>,
    perm_count: usize,
}

/// Builds the Gram matrix Γ_{T,T′} = ⟨Q_T|Q_{T′}⟩^n over the canonical Σ_{t,t}.
pub fn gram(t: usize, n: usize) -> Result<CommutantModel> {
    if t == 0 || t > MAX_SIGMA_T {
        return Err(Error::resource(format!("Gram matrices need 1 ≤ t ≤ {MAX_SIGMA_T}, got {t}")));
    }
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    let sigma = sigma(t)?;
    let m = sigma.len();
    let mut gram_log2 = vec![0i32; m * m];
    for i in 0..m {
        for j in i..m {
            let g = overlap_exact(&sigma[i], &sigma[j])?;
            gram_log2[i * m + j] = g;
            gram_log2[j * m + i] = g;
        }
    }
    let gram = DMatrix::from_fn(m, m, |i, j| (f64::from(gram_log2[i * m + j]) * n as f64).exp2());
    let perm_count = sigma.iter().take_while(|s| s.is_permutation()).count();
    Ok(CommutantModel { t, n, sigma, gram_log2, gram, perm_count })
}

impl CommutantModel {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &'static [StochasticLagrangian] {
        self.sigma
    }

    /// Number of leading permutation elements (t!).
    pub fn perm_count(&self) -> usize {
        self.perm_count
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Exponent g with Γ_{i,j} = 2^{n·g}.
    pub fn gram_log2(&self, i: usize, j: usize) -> i32 {
        self.gram_log2[i * self.size() + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.gram.row_iter().map(|r| r.sum()).collect()
    }

    /// Checks Σ_{T′} 2^{n(g+t−1)} = ∏_{r=0}^{t−2} (2^n + 2^r) in integer
    /// arithmetic for every row. Returns `None` when the integers would not
    /// fit in 128 bits.
    pub fn exact_row_sum_check(&self) -> Option<bool> {
        let shift_total = self.n.checked_mul(self.t.saturating_sub(1))?;
        if shift_total + 10 >= 128 || self.n >= 127 {
            return None;
        }
        let rhs: u128 = (0..self.t.saturating_sub(1)).map(|r| (1u128 << self.n) + (1u128 << r)).product();
        let m = self.size();
        let offset = self.t as i32 - 1;
        Some((0..m).all(|i| {
            let lhs: u128 = (0..m).map(|j| 1u128 << (self.n as i32 * (self.gram_log2(i, j) + offset)) as u32).sum();
            lhs == rhs
        }))
    }

    /// Eigenvalues of Γ in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.gram.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Numerical rank of Γ at the conditioning floor.
    pub fn rank(&self) -> usize {
        let e = self.eigenvalues();
        let top = e.last().copied().unwrap_or(0.0);
        e.iter().filter(|&&x| x > CONDITIONING_FLOOR * top).count()
    }

    pub fn check_conditioning(&self) -> Result<()> {
        let e = self.eigenvalues();
        let (lo, hi) = (e[0], e[e.len() - 1]);
        if lo < CONDITIONING_FLOOR * hi {
            return Err(Error::conditioning(format!(
                "Gram matrix for t = {}, n = {} has eigenvalue ratio {:.3e} (need n ≥ t − 1)",
                self.t,
                self.n,
                lo / hi
            )));
        }
        Ok(())
    }

    /// ‖Γ − 𝟙‖_∞.
    pub fn frame_operator_deviation(&self) -> f64 {
        let e = self.eigenvalues();
        (e[0] - 1.0).abs().max((e[e.len() - 1] - 1.0).abs())
    }

    /// Γ^{−1}: P_Cl = Σ_{T,T′} (Γ^{−1})_{T,T′} |Q_T^{⊗n}⟩⟨Q_{T′}^{⊗n}|.
    pub fn clifford_projector_coeffs(&self) -> Result<DMatrix<f64>> {
        self.check_conditioning()?;
        self.gram
            .clone()
            .cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::conditioning("Gram matrix is not positive definite"))
    }

    /// P_Cl as a map on Q-coordinates: c ↦ Γ^{−1}Γ c (the identity).
    pub fn clifford_small_basis_map(&self) -> Result<DMatrix<f64>> {
        Ok(self.clifford_projector_coeffs()? * &self.gram)
    }

    /// P_H as a map on Q-coordinates: projects onto the permutation block,
    /// c ↦ [Γ_pp^{−1} Γ_{p,:} c ; 0].
    pub fn haar_small_basis_map(&self) -> Result<DMatrix<f64>> {
        let p = self.perm_count;
        let m = self.size();
        let gpp = self.gram.view((0, 0), (p, p)).clone_owned();
        let chol =
            gpp.cholesky().ok_or_else(|| Error::conditioning("permutation Gram block is not positive definite"))?;
        let top = chol.solve(&self.gram.view((0, 0), (p, m)).clone_owned());
        let mut out = DMatrix::zeros(m, m);
        out.view_mut((0, 0), (p, m)).copy_from(&top);
        Ok(out)
    }

    /// Rank of a small-basis map measured in the Gram metric.
    pub fn map_rank(&self, map: &DMatrix<f64>) -> usize {
        let metric = map.transpose() * &self.gram * map;
        let e = metric.symmetric_eigen().eigenvalues;
        let top = e.max().max(0.0);
        e.iter().filter(|&&x| x > 1e-9 * top.max(1e-300)).count()
    }
}

/// Gram–Schmidt basis E_j = Σ_{i≤j} A_{i,j} Q_{T_i}^{⊗n} with cofactor scaling.
#[derive(Clone, Debug)]
pub struct GramSchmidtBasis {
    /// Upper triangular: column j holds the coefficients of E_j.
    pub coefficients: DMatrix<f64>,
    /// ⟨E_j|E_j⟩ = D_{j−1} D_j with D_j the leading principal minors of Γ.
    pub squared_norms: Vec<f64>,
}

/// Computes A_{i,j} = (−1)^{i+j} det(Γ_{[j]∖{j}, [j]∖{i}}) for all i ≤ j.
///
/// Each column solves Γ_{j−1} a = −γ_j and rescales by D_{j−1}, which equals
/// the cofactor (Cramer's rule) without evaluating minors separately.
pub fn gram_schmidt_cofactors(model: &CommutantModel) -> Result<GramSchmidtBasis> {
    model.check_conditioning()?;
    let m = model.size();
    let g = model.gram();
    let chol = g.clone().cholesky().ok_or_else(|| Error::conditioning("Gram matrix is not positive definite"))?;
    let l = chol.l();
    // d_j = L_jj², D_j = ∏_{i≤j} d_i
    let d: Vec<f64> = (0..m).map(|j| l[(j, j)] * l[(j, j)]).collect();
    let mut lead = Vec::with_capacity(m + 1);
    lead.push(1.0);
    for j in 0..m {
        lead.push(lead[j] * d[j]);
    }
    // unit lower factor U with Γ = U diag(d) Uᵀ; monic coefficients are U^{−T}
    let mut unit = l.clone();
    for j in 0..m {
        let s = l[(j, j)];
        for i in j..m {
            unit[(i, j)] /= s;
        }
    }
    let inv = unit
        .solve_lower_triangular(&DMatrix::identity(m, m))
        .ok_or_else(|| Error::conditioning("triangular factor is singular"))?;
    let mut coefficients = inv.transpose();
    for (j, &scale) in lead.iter().take(m).enumerate() {
        coefficients.column_mut(j).iter_mut().for_each(|a| *a *= scale);
    }
    let squared_norms = (0..m).map(|j| lead[j] * lead[j + 1]).collect();
    Ok(GramSchmidtBasis { coefficients, squared_norms })
}

/// Exact A_{i,j} = (−1)^{i+j} det(Γ_{[j]∖{j}, [j]∖{i}}) as a dyadic rational.
///
/// Gram entries are powers of two, so the minor is scaled to an integer
/// matrix and evaluated by fraction-free (Bareiss) elimination.
pub fn exact_cofactor(model: &CommutantModel, i: usize, j: usize) -> Result<BigRational> {
    if i > j || j >= model.size() {
        return Err(Error::arg(format!(
            "cofactor ({i}, {j}) outside the upper triangle of a {0}×{0} matrix",
            model.size()
        )));
    }
    let n = model.n() as i64;
    let rows: Vec<usize> = (0..j).collect();
    let cols: Vec<usize> = (0..=j).filter(|&c| c != i).collect();
    let m = rows.len();
    let sign = if (i + j).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    if m == 0 {
        return Ok(BigRational::from_integer(sign));
    }
    let exps: Vec<i64> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .map(|(r, c)| n * i64::from(model.gram_log2(r, c)))
        .collect();
    let shift = -exps.iter().copied().min().unwrap_or(0);
    let mut a: Vec<Vec<BigInt>> =
        (0..m).map(|r| (0..m).map(|c| BigInt::one() << ((exps[r * m + c] + shift) as usize)).collect()).collect();
    let det = bareiss(&mut a);
    let scale = BigInt::one() << ((shift * m as i64) as usize);
    Ok(BigRational::new(sign * det, scale))
}

fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let m = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..m {
        if a[k][k].is_zero() {
            match (k + 1..m).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for r in k + 1..m {
            for c in k + 1..m {
                let v = (&a[r][c] * &a[k][k] - &a[r][k] * &a[k][c]) / &prev;
                a[r][c] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

/// Outcome of checking the three coefficient bounds of the Gram–Schmidt basis.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CoefficientBounds {
    pub applicable: bool,
    pub defect_weighted: bool,
    pub off_diagonal: bool,
    pub diagonal: bool,
    /// max log₂(|A_ij| / bound) for each of the three families.
    pub slack_log2: [f64; 3],
}

impl GramSchmidtBasis {
    /// Largest normalized off-diagonal inner product ⟨E_i|E_j⟩/(‖E_i‖‖E_j‖).
    pub fn max_normalized_overlap(&self, model: &CommutantModel) -> f64 {
        let a = &self.coefficients;
        let inner = a.transpose() * model.gram() * a;
        let m = inner.nrows();
        let mut worst = 0f64;
        for i in 0..m {
            for j in 0..i {
                let v = inner[(i, j)].abs() / (inner[(i, i)] * inner[(j, j)]).sqrt();
                worst = worst.max(v);
            }
        }
        worst
    }

    pub fn check_bounds(&self, model: &CommutantModel) -> CoefficientBounds {
        let (t, n) = (model.t() as f64, model.n() as f64);
        let a = &self.coefficients;
        let dims: Vec<f64> = model.sigma().iter().map(|s| s.left_defect_dim() as f64).collect();
        let m = model.size();
        let mut slack = [f64::NEG_INFINITY; 3];
        for j in 0..m {
            for i in 0..=j {
                let v = a[(i, j)].abs();
                let first = t.powi(3) + 4.0 * t * t + 6.0 * t - n * (dims[i] - dims[j]).abs();
                slack[0] = slack[0].max(v.log2() - first);
                if i != j {
                    slack[1] = slack[1].max(v.log2() - (2.0 * t * t + 10.0 * t - n));
                } else {
                    slack[2] = slack[2].max((v - 1.0).abs().log2() - (t * t + 7.0 * t - n));
                }
            }
        }
        CoefficientBounds {
            applicable: 2.0 * n >= t * t + 5.0 * t,
            defect_weighted: slack[0] <= 0.0,
            off_diagonal: slack[1] <= 0.0,
            diagonal: slack[2] <= 0.0,
            slack_log2: slack,
        }
    }
}

/// Convenience wrapper for ‖Γ − 𝟙‖_∞ at (t, n).
pub fn frame_operator_deviation(t: usize, n: usize) -> Result<f64> {
    Ok(gram(t, n)?.frame_operator_deviation())
}
