pub fn overview() -> &'static str {
    "cdl computes exact and sampled quantities for unitary t-designs built from Clifford \
circuits interleaved with single-qubit non-Clifford gates.\n\
Run `cdl <subcommand> --explain` for what a subcommand checks. Subcommands: enumerate, gram, \
haar-overlap, hamming, eta, converge, bound, gap, frame-potential, sample-clifford."
}

pub fn text(name: &str) -> &'static str {
    match name {
        "enumerate" => {
            "enumerate --t T\n\
Lists the stochastic Lagrangian subspaces T ⊂ F₂^{2t} (self-dual for x·x' − y·y', \
containing the all-ones vector). Their number is ∏_{k=0}^{t−2}(2^k + 1) and exactly t! of them \
are graphs of permutations. These index the operators r(T) spanning the commutant of the \
t-fold tensor power of the Clifford group."
        }
        "gram" => {
            "gram --t T --n N [--matrix] [--bounds]\n\
Builds the Gram matrix Γ_{T,T'} = ⟨Q_T|Q_T'⟩^n = 2^{n(dim(T∩T') − t)}. Reports the row sums, \
which must all equal ∏_{r=0}^{t−2}(1 + 2^{r−n}), the spectrum, and ‖Γ − 𝟙‖_∞, which the \
Perron bound controls by the row sum minus one. With --bounds it forms the Gram–Schmidt \
basis E_j = Σ_i A_{i,j} Q_{T_i}^{⊗n} with cofactor coefficients and checks the three \
coefficient bounds (defect-weighted, off-diagonal, diagonal)."
        }
        "haar-overlap" => {
            "haar-overlap --t T [--anti-identity]\n\
Evaluates ⟨Q_T|P_H|Q_T⟩ with P_H the projection onto the span of permutation operators. \
Permutations give 1 and every other T gives at most 7/8, which is the source of the \
contraction per non-Clifford layer. The t = 6 anti-identity gives exactly 4/7."
        }
        "hamming" => {
            "hamming --t T\n\
Exact dyadic probabilities: that a stochastic orthogonal matrix preserves Hamming weight \
(with the column-weight bound ½ + 2^{−(r+1)}C(r+1,(r+1)/2)), that (x, y) ∈ T has equal \
weights (at most 7/8 unless T is a permutation), and that a defect shift x ↦ x + n preserves \
weight. At t = 6 the anti-identity gives 13/16; at t = 4 the all-ones defect gives 7/8 and 3/4."
        }
        "eta" => {
            "eta --t T --gate K\n\
Largest eigenvalue below one of the single-site operator ⅓(Ad_K + Ad_K† + id)^{⊗t} \
compressed to the non-permutation directions. η < 1 exactly when K is non-Clifford and \
t ≥ 4; for t ≤ 3 the Clifford group is already a design and η = 0."
        }
        "converge" => {
            "converge --t T --n N --gate K --k-max M [--kind standard|no-identity|haar]\n\
Computes ‖[(P_Cl − P_H) R(K)]^k‖₂ exactly in the |Σ_{t,t}|-dimensional commutant basis, \
where R(K) applies the injection on one qubit. The norms decay like the spectral radius \
of the compressed operator, reported as spectral_contraction. For t ≤ 3 all norms vanish."
        }
        "bound" => {
            "bound --t T --n N --k K [--eta-bar E] [--eps EPS]\n\
log₂ of the analytic bound 2^{33t⁴ + t log₂ k}(1 + 2^{32t² − n})^{5k} η̄^{k−1} on the \
distance to a t-design after k injections, evaluated in the log domain. With --eps, also \
the sufficient depth 36(33t⁴ + 3t log₂(1/ε)) for Haar-random injections."
        }
        "gap" => {
            "gap --t T --n N\n\
Dense eigensolve of H_{n,t} = n(id − Δ_t(σ)) for the local walk with generators \
{H⊗𝟙, S⊗𝟙, S³⊗𝟙, CX} on adjacent pairs with periodic boundary. Reports the gap, the \
ground-space dimension (equal to the Gram rank), the distance between the ground projector \
and the span of r(T)^{⊗n}, and λ₂ of Δ_t(σ), which satisfies λ₂ = 1 − gap/n."
        }
        "frame-potential" => {
            "frame-potential --t T --n N --family haar|clifford|interleaved [--gate K --k K] [--sweep]\n\
Monte Carlo estimate of ∫∫|tr(U†V)|^{2t}. Haar gives t! for 2^n ≥ t, uniform Cliffords give \
|Σ_{t,t}| for n ≥ t − 1, and the interleaved family C₀K₁C₁⋯C_{k−1}K_k gives \
t! + ‖[(P_Cl − P_H)R(K)]^k‖₂². Draws are grouped in blocks, all pairs within a block are \
used, and the standard error is the jackknife over blocks."
        }
        "sample-clifford" => {
            "sample-clifford --n N --count C [--seed S] [--format tableau-json]\n\
Draws uniform Cliffords as a uniform symplectic matrix over F₂ plus uniform signs, and \
prints the images of X_j and Z_j as signed Pauli strings (qubit 0 first)."
        }
        _ => overview(),
    }
}
