//! Stabilizer tableaux, uniform Clifford sampling, synthesis into
//! {H, S, S³, CX}, and dense oracles for systems of a few qubits: exact
//! moment operators, the local-walk Hamiltonian gap and Monte Carlo frame
//! potentials.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::commutant::gram;
use crate::error::{Error, Result};
use crate::lagrangian::{sigma, StochasticLagrangian};
use crate::moments::{tensor_power, GateK};
use crate::operators::{permutations, C64};

pub const MAX_TABLEAU_QUBITS: usize = 64;
/// Largest register converted to a dense unitary.
pub const MAX_UNITARY_QUBITS: usize = 10;
/// Largest operator dimension 2^{nt} for dense superoperator oracles.
pub const MAX_DENSE_DIM: usize = 64;

fn popcount(x: u64) -> u32 {
    x.count_ones()
}

/// i^phase X^x Z^z on up to 64 qubits; qubit j is bit j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl Pauli {
    pub fn identity() -> Self {
        Self { x: 0, z: 0, phase: 0 }
    }

    /// (−1)^negative i^{|x∧z|} X^x Z^z, the Hermitian Pauli with given support.
    pub fn hermitian(x: u64, z: u64, negative: bool) -> Self {
        let phase = ((popcount(x & z) + if negative { 2 } else { 0 }) % 4) as u8;
        Self { x, z, phase }
    }

    pub fn x_on(j: usize) -> Self {
        Self::hermitian(1 << j, 0, false)
    }

    pub fn z_on(j: usize) -> Self {
        Self::hermitian(0, 1 << j, false)
    }

    pub fn mul(&self, other: &Pauli) -> Pauli {
        let phase = (u32::from(self.phase) + u32::from(other.phase) + 2 * popcount(self.z & other.x)) % 4;
        Pauli { x: self.x ^ other.x, z: self.z ^ other.z, phase: phase as u8 }
    }

    pub fn is_hermitian(&self) -> bool {
        (u32::from(self.phase) + popcount(self.x & self.z)).is_multiple_of(2)
    }

    /// Sign relative to the Hermitian representative; meaningful for
    /// Hermitian Paulis only.
    pub fn is_negative(&self) -> bool {
        (u32::from(self.phase) + 4 - popcount(self.x & self.z) % 4) % 4 == 2
    }

    pub fn commutes(&self, other: &Pauli) -> bool {
        (popcount(self.x & other.z) + popcount(self.z & other.x)).is_multiple_of(2)
    }

    /// Dense 2^n × 2^n matrix.
    pub fn to_dense(&self, n: usize) -> DMatrix<C64> {
        let d = 1usize << n;
        let unit = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        let mut m = DMatrix::zeros(d, d);
        for y in 0..d as u64 {
            let sign = if popcount(self.z & y).is_multiple_of(2) { 0 } else { 2 };
            m[((y ^ self.x) as usize, y as usize)] = unit[(usize::from(self.phase) + sign) % 4];
        }
        m
    }

    /// G P G† for an elementary gate.
    pub fn conjugated_by(&self, gate: Gate) -> Pauli {
        let mut p = *self;
        match gate {
            Gate::H(q) => {
                let (a, b) = ((p.x >> q) & 1, (p.z >> q) & 1);
                p.x = (p.x & !(1 << q)) | (b << q);
                p.z = (p.z & !(1 << q)) | (a << q);
                p.phase = ((u64::from(p.phase) + 2 * (a & b)) % 4) as u8;
            }
            Gate::S(q) => {
                let a = (p.x >> q) & 1;
                p.phase = ((u64::from(p.phase) + a) % 4) as u8;
                p.z ^= a << q;
            }
            Gate::Sdg(q) => {
                for _ in 0..3 {
                    p = p.conjugated_by(Gate::S(q));
                }
            }
            Gate::CX(c, t) => {
                p.x ^= ((p.x >> c) & 1) << t;
                p.z ^= ((p.z >> t) & 1) << c;
            }
        }
        p
    }
}

/// Elementary gates of the canonical set {H, S, S³, CX}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gate {
    H(usize),
    S(usize),
    /// S³ = S†.
    Sdg(usize),
    /// CX(control, target).
    CX(usize, usize),
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    fn max_qubit(self) -> usize {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => q,
            Gate::CX(c, t) => c.max(t),
        }
    }

    fn relabel(self, map: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(map(q)),
            Gate::S(q) => Gate::S(map(q)),
            Gate::Sdg(q) => Gate::Sdg(map(q)),
            Gate::CX(c, t) => Gate::CX(map(c), map(t)),
        }
    }
}

/// Left-multiplies a dense matrix (rows indexed by basis states) by a gate.
pub fn apply_gate_left(m: &mut DMatrix<C64>, gate: Gate) {
    let d = m.nrows();
    let ncols = m.ncols();
    match gate {
        Gate::H(q) => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for r in (0..d).filter(|r| r >> q & 1 == 0) {
                let s = r | 1 << q;
                for c in 0..ncols {
                    let (a, b) = (m[(r, c)], m[(s, c)]);
                    m[(r, c)] = (a + b) * h;
                    m[(s, c)] = (a - b) * h;
                }
            }
        }
        Gate::S(q) | Gate::Sdg(q) => {
            let f = if matches!(gate, Gate::S(_)) { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
            for r in (0..d).filter(|r| r >> q & 1 == 1) {
                for c in 0..ncols {
                    m[(r, c)] *= f;
                }
            }
        }
        Gate::CX(ctl, tgt) => {
            for r in (0..d).filter(|r| r >> ctl & 1 == 1 && r >> tgt & 1 == 0) {
                m.swap_rows(r, r | 1 << tgt);
            }
        }
    }
}

/// Dense unitary of a gate sequence applied in time order.
pub fn circuit_unitary(n: usize, gates: &[Gate]) -> Result<DMatrix<C64>> {
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::resource(format!("dense unitaries limited to {MAX_UNITARY_QUBITS} qubits")));
    }
    if let Some(g) = gates.iter().find(|g| g.max_qubit() >= n) {
        return Err(Error::arg(format!("gate {g:?} out of range for {n} qubits")));
    }
    let mut u = DMatrix::identity(1 << n, 1 << n);
    for &g in gates {
        apply_gate_left(&mut u, g);
    }
    Ok(u)
}

/// Images of X_j (rows 0..n) and Z_j (rows n..2n) under conjugation by a
/// Clifford unitary U.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Tableau {
    n: usize,
    rows: Vec<Pauli>,
}

impl Tableau {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(Pauli::x_on).chain((0..n).map(Pauli::z_on)).collect();
        Self { n, rows }
    }

    pub fn from_rows(n: usize, rows: Vec<Pauli>) -> Result<Self> {
        if n == 0 || n > MAX_TABLEAU_QUBITS {
            return Err(Error::arg(format!("tableau needs 1 ≤ n ≤ {MAX_TABLEAU_QUBITS}")));
        }
        if rows.len() != 2 * n {
            return Err(Error::Dimension { expected: 2 * n, found: rows.len() });
        }
        let tab = Self { n, rows };
        if !tab.is_valid() {
            return Err(Error::arg("rows are not Hermitian or violate the symplectic condition"));
        }
        Ok(tab)
    }

    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self> {
        let mut tab = Self::identity(n);
        for &g in gates {
            if g.max_qubit() >= n {
                return Err(Error::arg(format!("gate {g:?} out of range for {n} qubits")));
            }
            tab.apply_gate(g);
        }
        Ok(tab)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Pauli] {
        &self.rows
    }

    pub fn is_valid(&self) -> bool {
        let n = self.n;
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        self.rows.iter().all(|p| p.is_hermitian() && p.x & !mask == 0 && p.z & !mask == 0)
            && (0..2 * n).all(|a| {
                (a + 1..2 * n).all(|b| {
                    let should_anticommute = b == a + n && a < n;
                    self.rows[a].commutes(&self.rows[b]) != should_anticommute
                })
            })
    }

    /// U P U†.
    pub fn conjugate(&self, p: &Pauli) -> Pauli {
        let mut out = Pauli { x: 0, z: 0, phase: p.phase };
        for j in (0..self.n).filter(|j| p.x >> j & 1 == 1) {
            out = out.mul(&self.rows[j]);
        }
        for j in (0..self.n).filter(|j| p.z >> j & 1 == 1) {
            out = out.mul(&self.rows[self.n + j]);
        }
        out
    }

    /// Tableau of self · other.
    pub fn compose(&self, other: &Tableau) -> Result<Tableau> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, found: other.n });
        }
        Ok(Tableau { n: self.n, rows: other.rows.iter().map(|p| self.conjugate(p)).collect() })
    }

    /// Replaces U by G·U.
    pub fn apply_gate(&mut self, gate: Gate) {
        for p in &mut self.rows {
            *p = p.conjugated_by(gate);
        }
    }

    /// Gate sequence (time order, canonical gate set) implementing U up to
    /// global phase.
    pub fn synthesize(&self) -> Vec<Gate> {
        let n = self.n;
        let mut work = self.clone();
        let mut reducing: Vec<Gate> = Vec::new();
        let mut push = |work: &mut Tableau, g: Gate| {
            work.apply_gate(g);
            reducing.push(g);
        };
        for j in 0..n {
            // X-image: move an X component onto qubit j
            let row = work.rows[j];
            let pivot = (j..n).find(|&m| row.x >> m & 1 == 1);
            let m = match pivot {
                Some(m) => m,
                None => {
                    let m = (j..n).find(|&m| row.z >> m & 1 == 1).expect("anticommutes with Z_j image");
                    push(&mut work, Gate::H(m));
                    m
                }
            };
            if m != j {
                push(&mut work, Gate::CX(j, m));
                push(&mut work, Gate::CX(m, j));
                push(&mut work, Gate::CX(j, m));
            }
            if work.rows[j].z >> j & 1 == 1 {
                push(&mut work, Gate::S(j));
            }
            clear_tail(&mut work, j, j, &mut push);
            // Z-image: has Z on qubit j; turn Y into Z with H S H
            if work.rows[n + j].x >> j & 1 == 1 {
                push(&mut work, Gate::H(j));
                push(&mut work, Gate::S(j));
                push(&mut work, Gate::H(j));
            }
            push(&mut work, Gate::H(j));
            clear_tail(&mut work, n + j, j, &mut push);
            push(&mut work, Gate::H(j));
        }
        // work = G·U is a Pauli; fix the signs
        let mut pauli_gates = Vec::new();
        for j in 0..n {
            if work.rows[j].is_negative() {
                // anticommutes with X_j: Z_j = S²
                pauli_gates.extend([Gate::S(j), Gate::S(j)]);
            }
            if work.rows[n + j].is_negative() {
                // X_j = H S² H
                pauli_gates.extend([Gate::H(j), Gate::S(j), Gate::S(j), Gate::H(j)]);
            }
        }
        // U = G† P: apply P first, then G_m†, …, G_1†
        pauli_gates.extend(reducing.iter().rev().map(|g| g.inverse()));
        pauli_gates
    }

    pub fn to_unitary(&self) -> Result<DMatrix<C64>> {
        circuit_unitary(self.n, &self.synthesize())
    }

    /// Reads the tableau off a dense Clifford unitary.
    pub fn from_unitary(u: &DMatrix<C64>) -> Result<Tableau> {
        let d = u.nrows();
        if d != u.ncols() || !d.is_power_of_two() {
            return Err(Error::arg("unitary must be square with power-of-two dimension"));
        }
        let n = d.trailing_zeros() as usize;
        if n == 0 || n > MAX_UNITARY_QUBITS {
            return Err(Error::resource("dense tableau extraction needs 1 ≤ n ≤ 10"));
        }
        let image = |p: Pauli| -> Result<Pauli> {
            let m = u * p.to_dense(n) * u.adjoint();
            // the image is ±(Hermitian Pauli); locate its support from column 0
            let row = (0..d).find(|&r| m[(r, 0)].norm() > 0.5).ok_or_else(|| Error::arg("not a Clifford"))?;
            let x = row as u64;
            let z = (0..n).fold(0u64, |acc, q| {
                let basis = 1usize << q;
                // compare column 2^q with column 0: entry ratio gives (−1)^{z_q}
                let a = m[(row ^ basis, basis)];
                let b = m[(row, 0)];
                if (a / b).re < 0.0 {
                    acc | 1 << q
                } else {
                    acc
                }
            });
            for neg in [false, true] {
                let cand = Pauli::hermitian(x, z, neg);
                if (cand.to_dense(n) - &m).iter().all(|v| v.norm() < 1e-8) {
                    return Ok(cand);
                }
            }
            Err(Error::arg("unitary does not map Paulis to Paulis"))
        };
        let rows = (0..n)
            .map(|j| image(Pauli::x_on(j)))
            .chain((0..n).map(|j| image(Pauli::z_on(j))))
            .collect::<Result<Vec<_>>>()?;
        Tableau::from_rows(n, rows)
    }

    /// Compact key identifying the Clifford up to global phase (n ≤ 16).
    pub fn key(&self) -> Vec<u64> {
        self.rows.iter().map(|p| p.x | p.z << 32 | u64::from(p.is_negative()) << 63).collect()
    }
}

/// Clears qubits m > j of `row` using CX(j,m), CZ(j,m) = H_m CX H_m, and S_m.
fn clear_tail(work: &mut Tableau, row: usize, j: usize, push: &mut impl FnMut(&mut Tableau, Gate)) {
    for m in j + 1..work.n {
        let p = work.rows[row];
        let (a, b) = (p.x >> m & 1, p.z >> m & 1);
        match (a, b) {
            (0, 0) => {}
            (1, 0) => push(work, Gate::CX(j, m)),
            (0, 1) => {
                push(work, Gate::H(m));
                push(work, Gate::CX(j, m));
                push(work, Gate::H(m));
            }
            _ => {
                push(work, Gate::S(m));
                push(work, Gate::CX(j, m));
            }
        }
    }
}

const EVEN_BITS: u128 = 0x5555_5555_5555_5555_5555_5555_5555_5555;

/// Symplectic form on interleaved vectors (x₀, z₀, x₁, z₁, …).
fn symplectic_inner(a: u128, b: u128) -> bool {
    let (ax, az) = (a & EVEN_BITS, (a >> 1) & EVEN_BITS);
    let (bx, bz) = (b & EVEN_BITS, (b >> 1) & EVEN_BITS);
    ((ax & bz).count_ones() + (az & bx).count_ones()) % 2 == 1
}

fn random_vector<R: Rng + ?Sized>(rng: &mut R, bits: usize) -> u128 {
    let v: u128 = rng.random();
    if bits == 128 {
        v
    } else {
        v & ((1u128 << bits) - 1)
    }
}

/// Uniform element of Sp(2n, F₂) as a list of images (X₀, Z₀, X₁, Z₁, …)
/// in interleaved coordinates.
///
/// Pairs are drawn one at a time: a uniform nonzero vector and then a
/// uniform partner with symplectic product 1, both inside the symplectic
/// complement of the pairs already chosen. The complement projection
/// v ↦ v + ⟨v,w⟩u + ⟨v,u⟩w is a composition of transvections.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u128> {
    let bits = 2 * n;
    let mut pairs: Vec<(u128, u128)> = Vec::with_capacity(n);
    let project = |mut v: u128, pairs: &[(u128, u128)]| {
        for &(u, w) in pairs {
            let cu = symplectic_inner(v, u);
            let cw = symplectic_inner(v, w);
            if cw {
                v ^= u;
            }
            if cu {
                v ^= w;
            }
        }
        v
    };
    for _ in 0..n {
        let u = loop {
            let v = project(random_vector(rng, bits), &pairs);
            if v != 0 {
                break v;
            }
        };
        let w = loop {
            let v = project(random_vector(rng, bits), &pairs);
            if symplectic_inner(u, v) {
                break v;
            }
        };
        pairs.push((u, w));
    }
    pairs.into_iter().flat_map(|(u, w)| [u, w]).collect()
}

fn deinterleave(v: u128, n: usize) -> (u64, u64) {
    let mut x = 0u64;
    let mut z = 0u64;
    for j in 0..n {
        x |= ((v >> (2 * j)) as u64 & 1) << j;
        z |= ((v >> (2 * j + 1)) as u64 & 1) << j;
    }
    (x, z)
}

/// Uniformly random n-qubit Clifford (modulo global phase).
pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tableau> {
    if n == 0 || n > MAX_TABLEAU_QUBITS {
        return Err(Error::arg(format!("sampling needs 1 ≤ n ≤ {MAX_TABLEAU_QUBITS}")));
    }
    let sym = random_symplectic(n, rng);
    let mut rows = vec![Pauli::identity(); 2 * n];
    for j in 0..n {
        let (xx, xz) = deinterleave(sym[2 * j], n);
        let (zx, zz) = deinterleave(sym[2 * j + 1], n);
        rows[j] = Pauli::hermitian(xx, xz, rng.random());
        rows[n + j] = Pauli::hermitian(zx, zz, rng.random());
    }
    Ok(Tableau { n, rows })
}

/// Haar-random unitary of dimension d (QR of a complex Ginibre matrix with
/// the phases of R's diagonal removed).
pub fn sample_haar<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|v| *v *= phase);
    }
    q
}

/// The 24 single-qubit Cliffords modulo phase, as dense 2×2 matrices.
pub fn single_qubit_cliffords() -> Vec<DMatrix<C64>> {
    let mut seen: HashMap<Vec<u64>, DMatrix<C64>> = HashMap::new();
    let mut frontier = vec![Vec::<Gate>::new()];
    while let Some(word) = frontier.pop() {
        let tab = Tableau::from_gates(1, &word).expect("valid");
        let key = tab.key();
        if seen.contains_key(&key) {
            continue;
        }
        seen.insert(key, circuit_unitary(1, &word).expect("small"));
        for g in [Gate::H(0), Gate::S(0)] {
            let mut next = word.clone();
            next.push(g);
            frontier.push(next);
        }
    }
    let mut out: Vec<(Vec<u64>, DMatrix<C64>)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, u)| u).collect()
}

/// Superoperator (column-stacked) of X ↦ U^{⊗t} X U^{†⊗t}.
fn moment_superop(u: &DMatrix<C64>, t: usize) -> DMatrix<C64> {
    let ut = tensor_power(u, t);
    ut.map(|z| z.conj()).kronecker(&ut)
}

/// Δ_t of the uniform measure on the single-qubit Clifford group (exact
/// 24-element average).
pub fn clifford1_moment(t: usize) -> Result<DMatrix<C64>> {
    if t == 0 || (1usize << t) > MAX_DENSE_DIM {
        return Err(Error::resource("dense moment operators need 2^t ≤ 64"));
    }
    let group = single_qubit_cliffords();
    let w = C64::new(1.0 / group.len() as f64, 0.0);
    let d2 = 1usize << (2 * t);
    let mut acc = DMatrix::zeros(d2, d2);
    for u in &group {
        acc += moment_superop(u, t) * w;
    }
    Ok(acc)
}

/// Dense Q_T^{⊗n} on t copies of an n-qubit register; copy c occupies bits
/// c·n .. c·n + n.
pub fn q_tensor_power(lagrangian: &StochasticLagrangian, n: usize) -> Result<DMatrix<C64>> {
    let t = lagrangian.t();
    let bits = n * t;
    if bits > 12 {
        return Err(Error::resource("dense Q^{⊗n} limited to nt ≤ 12"));
    }
    let d = 1usize << bits;
    let single: HashMap<(u64, u64), ()> = lagrangian.pairs().map(|p| (p, ())).collect();
    let norm = (-(bits as f64) / 2.0).exp2();
    let slice = |v: usize, q: usize| -> u64 { (0..t).fold(0, |acc, c| acc | ((v >> (c * n + q)) as u64 & 1) << c) };
    Ok(DMatrix::from_fn(d, d, |r, c| {
        if (0..n).all(|q| single.contains_key(&(slice(r, q), slice(c, q)))) {
            C64::new(norm, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Dense operator permuting the t copies of an n-qubit register.
fn copy_permutation(perm: &[usize], n: usize) -> DMatrix<C64> {
    let t = perm.len();
    let d = 1usize << (n * t);
    let mask = (1usize << n) - 1;
    let mut m = DMatrix::zeros(d, d);
    for v in 0..d {
        let w = (0..t).fold(0usize, |acc, c| acc | ((v >> (c * n)) & mask) << (perm[c] * n));
        m[(w, v)] = C64::new(1.0, 0.0);
    }
    m
}

/// Orthogonal projection onto the span of a family of operators, applied
/// matrix-free: returns (orthonormal family, as D×D matrices).
fn orthonormalize(family: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
    let m = family.len();
    let gram =
        DMatrix::from_fn(m, m, |i, j| family[i].iter().zip(family[j].iter()).map(|(a, b)| a.conj() * b).sum::<C64>());
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.max();
    (0..m)
        .filter(|&k| eig.eigenvalues[k] > 1e-9 * top)
        .map(|k| {
            let s = 1.0 / eig.eigenvalues[k].sqrt();
            let mut acc = DMatrix::zeros(family[0].nrows(), family[0].ncols());
            for (i, f) in family.iter().enumerate() {
                acc += f * (eig.eigenvectors[(i, k)] * s);
            }
            acc
        })
        .collect()
}

fn project(basis: &[DMatrix<C64>], a: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for b in basis {
        let c: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
        out += b * c;
    }
    out
}

/// ‖[(P_Cl − P_H) R(K)]^k‖₂ computed with dense 2^{nt}-dimensional
/// operators: the superoperator norm is accumulated over all D² matrix
/// units |a⟩⟨b|.
pub fn dense_convergence_norm(t: usize, n: usize, gate: &GateK, k: usize) -> Result<f64> {
    let d = 1usize << (n * t);
    if d > MAX_DENSE_DIM || t > 5 {
        return Err(Error::resource("dense convergence oracle needs 2^{nt} ≤ 64"));
    }
    let spaces = sigma(t)?;
    let cl_family = spaces.iter().map(|s| q_tensor_power(s, n)).collect::<Result<Vec<_>>>()?;
    let cl = orthonormalize(&cl_family);
    let h_family: Vec<DMatrix<C64>> = permutations(t).iter().map(|p| copy_permutation(p, n)).collect();
    let haar = orthonormalize(&h_family);
    // K on qubit 0 of every copy
    let id_rest = DMatrix::<C64>::identity(1 << (n - 1), 1 << (n - 1));
    let local = |u: &DMatrix<C64>| tensor_power(&id_rest.kronecker(u), t);
    let ks = [local(gate.matrix()), local(&gate.matrix().adjoint())];
    let r = |a: &DMatrix<C64>| -> DMatrix<C64> {
        let mut out = a / C64::new(3.0, 0.0);
        for u in &ks {
            out += u * a * u.adjoint() / C64::new(3.0, 0.0);
        }
        out
    };
    let step = |a: &DMatrix<C64>| {
        let ra = r(a);
        project(&cl, &ra) - project(&haar, &ra)
    };
    let mut total = 0.0;
    for a in 0..d {
        for b in 0..d {
            let mut e = DMatrix::zeros(d, d);
            e[(a, b)] = C64::new(1.0, 0.0);
            for _ in 0..k {
                e = step(&e);
            }
            total += e.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    Ok(total.sqrt())
}

/// P_Cl for t copies of n qubits as a dense superoperator, built from the
/// commutant basis and its Gram inverse.
pub fn clifford_projector_dense(t: usize, n: usize) -> Result<DMatrix<C64>> {
    let d = 1usize << (n * t);
    if d > 16 {
        return Err(Error::resource("dense projector superoperators need 2^{nt} ≤ 16"));
    }
    let spaces = sigma(t)?;
    let family = spaces.iter().map(|s| q_tensor_power(s, n)).collect::<Result<Vec<_>>>()?;
    let basis = orthonormalize(&family);
    let mut s = DMatrix::zeros(d * d, d * d);
    for b in &basis {
        let v = DVector::from_iterator(d * d, b.iter().copied());
        s += &v * v.adjoint();
    }
    Ok(s)
}

/// P_H on t copies of n qubits as a dense superoperator.
pub fn haar_projector_dense(t: usize, n: usize) -> Result<DMatrix<C64>> {
    let d = 1usize << (n * t);
    if d > 16 {
        return Err(Error::resource("dense projector superoperators need 2^{nt} ≤ 16"));
    }
    let family: Vec<DMatrix<C64>> = permutations(t).iter().map(|p| copy_permutation(p, n)).collect();
    let mut s = DMatrix::zeros(d * d, d * d);
    for b in orthonormalize(&family) {
        let v = DVector::from_iterator(d * d, b.iter().copied());
        s += &v * v.adjoint();
    }
    Ok(s)
}

/// Measures with dense moment operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseMeasure {
    /// Exact average over the 24 single-qubit Cliffords.
    Clifford1,
    /// Uniform two-qubit Cliffords through the commutant projection; the
    /// group average itself is only checked by sampling.
    Clifford2,
}

/// Δ_t(ν) as a dense column-stacked superoperator.
pub fn dense_moment_operator(measure: DenseMeasure, t: usize) -> Result<DMatrix<C64>> {
    match measure {
        DenseMeasure::Clifford1 => clifford1_moment(t),
        DenseMeasure::Clifford2 => clifford_projector_dense(t, 2),
    }
}

/// Monte Carlo estimate of a moment superoperator: average of Ū^{⊗t}⊗U^{⊗t}.
pub fn sampled_moment(t: usize, unitaries: &[DMatrix<C64>]) -> DMatrix<C64> {
    let w = C64::new(1.0 / unitaries.len() as f64, 0.0);
    let mut acc: Option<DMatrix<C64>> = None;
    for u in unitaries {
        let s = moment_superop(u, t) * w;
        acc = Some(match acc {
            Some(a) => a + s,
            None => s,
        });
    }
    acc.unwrap_or_else(|| DMatrix::zeros(0, 0))
}

/// One operation of a circuit: a canonical Clifford gate or an injected
/// single-qubit K (or K†).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CircuitOp {
    Clifford(Gate),
    K { qubit: usize, dagger: bool },
}

/// Gate list over {H, S, S³, CX} with optional K injections.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitSpec {
    n: usize,
    ops: Vec<CircuitOp>,
}

impl CircuitSpec {
    pub fn new(n: usize, ops: Vec<CircuitOp>) -> Result<Self> {
        if n == 0 || n > MAX_TABLEAU_QUBITS {
            return Err(Error::arg(format!("circuits need 1 ≤ n ≤ {MAX_TABLEAU_QUBITS}")));
        }
        for op in &ops {
            let q = match op {
                CircuitOp::Clifford(g) => g.max_qubit(),
                CircuitOp::K { qubit, .. } => *qubit,
            };
            if q >= n {
                return Err(Error::arg(format!("{op:?} out of range for {n} qubits")));
            }
            if let CircuitOp::Clifford(Gate::CX(c, t)) = op {
                if c == t {
                    return Err(Error::arg("CX needs distinct qubits"));
                }
            }
        }
        Ok(Self { n, ops })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(|op| matches!(op, CircuitOp::Clifford(_)))
    }

    /// Tableau of a K-free circuit.
    pub fn tableau(&self) -> Result<Tableau> {
        let gates: Vec<Gate> = self
            .ops
            .iter()
            .map(|op| match op {
                CircuitOp::Clifford(g) => Ok(*g),
                CircuitOp::K { .. } => Err(Error::arg("circuit contains K injections")),
            })
            .collect::<Result<_>>()?;
        Tableau::from_gates(self.n, &gates)
    }

    /// Dense unitary; `gate` supplies K when the circuit injects it.
    pub fn unitary(&self, gate: Option<&GateK>) -> Result<DMatrix<C64>> {
        if self.n > MAX_UNITARY_QUBITS {
            return Err(Error::resource(format!("dense unitaries limited to {MAX_UNITARY_QUBITS} qubits")));
        }
        let d = 1usize << self.n;
        let mut u = DMatrix::identity(d, d);
        for op in &self.ops {
            match *op {
                CircuitOp::Clifford(g) => apply_gate_left(&mut u, g),
                CircuitOp::K { qubit, dagger } => {
                    let k = gate.ok_or_else(|| Error::arg("circuit injects K but no gate was given"))?;
                    let m = if dagger { k.matrix().adjoint() } else { k.matrix().clone() };
                    apply_single_left(&mut u, qubit, &m);
                }
            }
        }
        Ok(u)
    }
}

fn apply_single_left(m: &mut DMatrix<C64>, q: usize, g: &DMatrix<C64>) {
    let d = m.nrows();
    for r in (0..d).filter(|r| r >> q & 1 == 0) {
        let s = r | 1 << q;
        for c in 0..m.ncols() {
            let (a, b) = (m[(r, c)], m[(s, c)]);
            m[(r, c)] = g[(0, 0)] * a + g[(0, 1)] * b;
            m[(s, c)] = g[(1, 0)] * a + g[(1, 1)] * b;
        }
    }
}

/// A local gate acting on slots 0 and 1 of an adjacent pair.
pub type LocalGate = Vec<Gate>;

/// Generators of a local random Clifford walk, closed under inverses.
#[derive(Clone, Debug)]
pub struct WalkGateSet {
    gates: Vec<LocalGate>,
}

impl WalkGateSet {
    pub fn new(gates: Vec<LocalGate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::arg("empty gate set"));
        }
        if gates.iter().flatten().any(|g| g.max_qubit() > 1) {
            return Err(Error::arg("local gates act on slots 0 and 1 only"));
        }
        let tabs: Vec<Tableau> = gates.iter().map(|g| Tableau::from_gates(2, g)).collect::<Result<_>>()?;
        let id = Tableau::identity(2);
        for a in &tabs {
            if !tabs.iter().any(|b| a.compose(b).map(|c| c == id).unwrap_or(false)) {
                return Err(Error::arg("gate set is not closed under inverses"));
            }
        }
        Ok(Self { gates })
    }

    /// {H⊗𝟙, S⊗𝟙, S³⊗𝟙, CX}.
    pub fn canonical() -> Self {
        Self::new(vec![vec![Gate::H(0)], vec![Gate::S(0)], vec![Gate::Sdg(0)], vec![Gate::CX(0, 1)]]).expect("closed")
    }

    pub fn gates(&self) -> &[LocalGate] {
        &self.gates
    }

    /// Adjacent pairs (i, i+1 mod n); for n = 2 both orientations, for n = 1
    /// only single-qubit gates are meaningful.
    pub fn sites(n: usize) -> Vec<(usize, usize)> {
        match n {
            1 => vec![(0, 0)],
            2 => vec![(0, 1), (1, 0)],
            _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        }
    }

    fn placed(&self, gate: usize, site: (usize, usize)) -> Vec<Gate> {
        self.gates[gate].iter().map(|g| g.relabel(|s| if s == 0 { site.0 } else { site.1 })).collect()
    }
}

/// One step of the local walk: a uniform generator at a uniform site.
pub fn local_walk_step<R: Rng + ?Sized>(state: &mut Tableau, gates: &WalkGateSet, rng: &mut R) -> Result<()> {
    let n = state.n();
    let sites = WalkGateSet::sites(n);
    let usable: Vec<usize> =
        (0..gates.gates.len()).filter(|&g| n > 1 || gates.gates[g].iter().all(|e| e.max_qubit() == 0)).collect();
    if usable.is_empty() {
        return Err(Error::arg("no usable gate for this register size"));
    }
    let site = sites[rng.random_range(0..sites.len())];
    let g = usable[rng.random_range(0..usable.len())];
    for e in gates.placed(g, site) {
        state.apply_gate(e);
    }
    Ok(())
}

/// Hermitian Pauli basis index for nt qubits: x | z << nt.
fn pauli_index(p: &Pauli, bits: usize) -> usize {
    (p.x | p.z << bits) as usize
}

/// Signed images of every Pauli string under Ad_g^{⊗t}, indexed as
/// `images[site][gate][i] = (j, sign)`.
fn walk_images(t: usize, n: usize, gates: &WalkGateSet) -> Vec<Vec<Vec<(usize, f64)>>> {
    let bits = n * t;
    let count = 1usize << (2 * bits);
    let mask = (1u64 << bits) - 1;
    let usable: Vec<usize> =
        (0..gates.gates.len()).filter(|&g| n > 1 || gates.gates[g].iter().all(|e| e.max_qubit() == 0)).collect();
    WalkGateSet::sites(n)
        .into_iter()
        .map(|site| {
            usable
                .iter()
                .map(|&g| {
                    let placed = gates.placed(g, site);
                    (0..count)
                        .map(|idx| {
                            let x = idx as u64 & mask;
                            let z = (idx as u64 >> bits) & mask;
                            let mut p = Pauli::hermitian(x, z, false);
                            for c in 0..t {
                                for e in &placed {
                                    p = p.conjugated_by(e.relabel(|q| c * n + q));
                                }
                            }
                            (pauli_index(&p, bits), if p.is_negative() { -1.0 } else { 1.0 })
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub t: usize,
    pub n: usize,
    /// Smallest nonzero eigenvalue of H_{n,t}.
    pub gap: f64,
    /// Multiplicity of the eigenvalue 0 of H_{n,t}.
    pub ground_dim: usize,
    /// Smallest eigenvalue of H_{n,t} (should vanish).
    pub ground_energy: f64,
    /// Second largest distinct eigenvalue of Δ_t(σ_G) (largest below 1).
    pub lambda2: f64,
    /// Rank of the Gram matrix of {r(T)^{⊗n}}.
    pub gram_rank: usize,
    /// ‖Π_ground − Π_span‖₂ between the ground projector and the projector
    /// onto span{r(T)^{⊗n}}.
    pub projector_distance: f64,
    /// Smallest eigenvalue over the local terms h_{i,i+1}.
    pub min_local_eigenvalue: f64,
}

/// Tolerance separating zero from nonzero eigenvalues of H_{n,t}.
const GROUND_TOL: f64 = 1e-9;

/// Spectral gap of H_{n,t} = n(id − Δ_t(σ_G)) = Σ_i h_{i,i+1} for the
/// canonical gate set, by dense eigensolves in the Pauli basis.
///
/// Both operators are real signed-permutation averages in the Pauli basis,
/// so they split into blocks along the orbits of the unsigned action.
pub fn hamiltonian_gap(t: usize, n: usize) -> Result<GapReport> {
    hamiltonian_gap_with(t, n, &WalkGateSet::canonical())
}

pub fn hamiltonian_gap_with(t: usize, n: usize, gates: &WalkGateSet) -> Result<GapReport> {
    if t == 0 || n == 0 || 4usize.pow((n * t) as u32) > 4096 {
        return Err(Error::resource("dense gap computation needs 4^{nt} ≤ 4096"));
    }
    let bits = n * t;
    let count = 1usize << (2 * bits);
    let sites = WalkGateSet::sites(n);
    let per_site = walk_images(t, n, gates);
    // orbits of the unsigned action
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for site in &per_site {
        for img in site {
            for (i, &(j, _)) in img.iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..count {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    blocks.sort();

    // span{r(T)^{⊗n}} in the normalized Pauli basis
    let spaces = sigma(t)?;
    // the family is closed under adjoints, so the real and imaginary parts
    // of the coefficient vectors span the same real space
    let mut span_vectors: Vec<DVector<f64>> = Vec::new();
    for s in spaces {
        let c = pauli_coefficients(&q_tensor_power(s, n)?, bits);
        span_vectors.push(c.map(|z| z.re));
        span_vectors.push(c.map(|z| z.im));
    }
    let span_basis = orthonormal_columns(&span_vectors);
    let gram_rank = gram(t, n)?.rank();

    let weight = 1.0 / (sites.len() * per_site[0].len()) as f64;
    let mut h_eigs = Vec::new();
    let mut d_eigs = Vec::new();
    let mut local_min = f64::INFINITY;
    let mut ground_vectors: Vec<DVector<f64>> = Vec::new();
    for block in &blocks {
        let pos: HashMap<usize, usize> = block.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let b = block.len();
        let mut delta = DMatrix::<f64>::zeros(b, b);
        let mut ham = DMatrix::<f64>::zeros(b, b);
        for site in &per_site {
            let mut local = DMatrix::<f64>::identity(b, b);
            for img in site {
                for (a, &i) in block.iter().enumerate() {
                    let (j, s) = img[i];
                    let c = pos[&j];
                    delta[(c, a)] += s * weight;
                    local[(c, a)] -= s / site.len() as f64;
                }
            }
            if n <= 2 || b <= 512 {
                local_min = local_min.min(local.clone().symmetric_eigenvalues().min());
            }
            ham += local;
        }
        let scale = n as f64 / sites.len() as f64;
        ham *= scale;
        let de = delta.clone().symmetric_eigenvalues();
        let he = ham.clone().symmetric_eigenvalues();
        if he.iter().any(|&x| x.abs() < GROUND_TOL) {
            let full = ham.symmetric_eigen();
            for k in 0..b {
                if full.eigenvalues[k].abs() < GROUND_TOL {
                    let mut v = DVector::zeros(count);
                    for (a, &i) in block.iter().enumerate() {
                        v[i] = full.eigenvectors[(a, k)];
                    }
                    ground_vectors.push(v);
                }
            }
        }
        h_eigs.extend(he.iter().copied());
        d_eigs.extend(de.iter().copied());
    }
    let ground_dim = h_eigs.iter().filter(|x| x.abs() < GROUND_TOL).count();
    let ground_energy = h_eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = h_eigs.iter().copied().filter(|&x| x >= GROUND_TOL).fold(f64::INFINITY, f64::min);
    let lambda2 = d_eigs.iter().copied().filter(|&x| x < 1.0 - GROUND_TOL / n as f64).fold(f64::NEG_INFINITY, f64::max);
    // for equal ranks ‖Π_g − Π_s‖₂ = √2 ‖(𝟙 − Π_s)V_g‖₂, which avoids the
    // cancellation in rank_g + rank_s − 2‖V_gᵀV_s‖²
    let residual: f64 = ground_vectors
        .iter()
        .map(|g| {
            let mut r = g.clone();
            for s in &span_basis {
                r -= s * s.dot(g);
            }
            r.norm_squared()
        })
        .sum();
    let projector_distance = if ground_vectors.len() == span_basis.len() {
        (2.0 * residual).sqrt()
    } else {
        let overlap: f64 =
            ground_vectors.iter().map(|g| span_basis.iter().map(|s| g.dot(s).powi(2)).sum::<f64>()).sum();
        (ground_vectors.len() as f64 + span_basis.len() as f64 - 2.0 * overlap).max(0.0).sqrt()
    };
    Ok(GapReport {
        t,
        n,
        gap,
        ground_dim,
        ground_energy,
        lambda2,
        gram_rank,
        projector_distance,
        min_local_eigenvalue: local_min,
    })
}

/// Coefficients of an operator in the orthonormal Hermitian Pauli basis
/// 2^{−bits/2} i^{|x∧z|} X^x Z^z.
fn pauli_coefficients(m: &DMatrix<C64>, bits: usize) -> DVector<C64> {
    let d = 1usize << bits;
    let count = d * d;
    let norm = 1.0 / (d as f64).sqrt();
    let mut out = DVector::zeros(count);
    for idx in 0..count {
        let x = (idx % d) as u64;
        let z = (idx / d) as u64;
        let p = Pauli::hermitian(x, z, false);
        // tr(P† M) with P sparse: P[y⊕x, y] = i^phase (−1)^{z·y}
        let unit = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        let mut acc = C64::new(0.0, 0.0);
        for y in 0..d as u64 {
            let sign = if popcount(z & y).is_multiple_of(2) { 0 } else { 2 };
            let entry = unit[(usize::from(p.phase) + sign) % 4];
            acc += entry.conj() * m[((y ^ x) as usize, y as usize)];
        }
        out[idx] = acc * norm;
    }
    out
}

/// Orthonormal basis of the span, from a thin SVD with a relative cutoff.
///
/// Greedy Gram–Schmidt is not used: with many dependent vectors its rounding
/// residues can pass any fixed threshold and add spurious directions.
fn orthonormal_columns(vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_columns(vectors);
    let svd = m.svd(true, false);
    let top = svd.singular_values.max();
    let u = svd.u.expect("left singular vectors requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &sv)| sv > 1e-9 * top)
        .map(|(k, _)| u.column(k).into_owned())
        .collect()
}

/// Distribution of unitaries whose frame potential is estimated.
#[derive(Clone, Debug)]
pub enum Family {
    Haar,
    Clifford,
    /// σ_k: C₀ K₁ C₁ K₂ ⋯ C_{k−1} K_k with uniform Cliffords C_i and K_i
    /// drawn uniformly from {K, K†, 𝟙} on qubit 0; σ₀ is the uniform
    /// Clifford measure.
    Interleaved {
        gate: GateK,
        k: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub blocks: usize,
}

/// Largest register size for Monte Carlo frame potentials.
pub const MAX_MC_QUBITS: usize = 5;

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn clifford_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    sample_clifford(n, rng).and_then(|t| t.to_unitary()).expect("n within limits")
}

/// Mean of |tr(U_i† U_j)|^{2t} over pairs i < j within a block.
///
/// With U = A + iB, tr(U_i†U_j) = ⟨a_i,a_j⟩ + ⟨b_i,b_j⟩ + i(⟨a_i,b_j⟩ − ⟨b_i,a_j⟩),
/// so two real matrix products give every pair at once.
fn block_pair_mean(t: usize, us: &[DMatrix<C64>]) -> f64 {
    let d2 = us[0].len();
    let b = us.len();
    let v = DMatrix::from_fn(b, 2 * d2, |i, a| if a < d2 { us[i][a].re } else { us[i][a - d2].im });
    let w = DMatrix::from_fn(b, 2 * d2, |i, a| if a < d2 { us[i][a].im } else { -us[i][a - d2].re });
    let re = &v * v.transpose();
    let im = &v * w.transpose();
    let mut acc = 0.0;
    for j in 0..b {
        for i in 0..j {
            let mag = re[(i, j)].powi(2) + im[(i, j)].powi(2);
            acc += mag.powi(t as i32);
        }
    }
    acc / (b * (b - 1) / 2) as f64
}

fn jackknife(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let total: f64 = values.iter().sum();
    let mean = total / m;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let loo: Vec<f64> = values.iter().map(|v| (total - v) / (m - 1.0)).collect();
    let loo_mean = loo.iter().sum::<f64>() / m;
    let var = (m - 1.0) / m * loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>();
    (mean, var.sqrt())
}

fn check_mc(t: usize, n: usize, samples: usize, block_size: usize) -> Result<()> {
    if n == 0 || n > MAX_MC_QUBITS {
        return Err(Error::resource(format!("Monte Carlo needs 1 ≤ n ≤ {MAX_MC_QUBITS}")));
    }
    if t == 0 {
        return Err(Error::arg("t must be positive"));
    }
    if block_size < 2 || samples < 2 * block_size {
        return Err(Error::arg("need block_size ≥ 2 and at least two blocks of samples"));
    }
    Ok(())
}

/// Unbiased estimate of ∫∫|tr(U†V)|^{2t} from `samples` independent draws.
///
/// Draws are split into blocks of `block_size`; each block contributes the
/// mean over all its pairs, and the standard error is the jackknife over
/// blocks. `block_size = 2` is the plain independent-pair estimator. Block b
/// uses ChaCha8 stream b of `seed`, so results do not depend on threading.
pub fn frame_potential_mc(
    t: usize,
    n: usize,
    family: &Family,
    samples: usize,
    block_size: usize,
    seed: u64,
) -> Result<FrameEstimate> {
    if let Family::Interleaved { gate, k } = family {
        let sweep = interleaved_sweep_mc(t, n, gate, *k, samples, block_size, seed)?;
        return Ok(sweep[*k].clone());
    }
    check_mc(t, n, samples, block_size)?;
    let blocks = samples / block_size;
    let d = 1usize << n;
    let values: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b as u64);
            let us: Vec<DMatrix<C64>> = (0..block_size)
                .map(|_| match family {
                    Family::Haar => sample_haar(d, &mut rng),
                    _ => clifford_unitary(n, &mut rng),
                })
                .collect();
            block_pair_mean(t, &us)
        })
        .collect();
    let (estimate, stderr) = jackknife(&values);
    Ok(FrameEstimate { estimate, stderr, samples: blocks * block_size, blocks })
}

/// Frame potentials of σ_k for every k = 0..=k_max from shared circuit
/// prefixes (each k is an unbiased estimate on its own).
///
/// Since (P_Cl R)^k = P_H + [(P_Cl − P_H)R]^k, the estimates should equal
/// t! + convergence_norm(k)² whenever n ≥ t − 1.
pub fn interleaved_sweep_mc(
    t: usize,
    n: usize,
    gate: &GateK,
    k_max: usize,
    samples: usize,
    block_size: usize,
    seed: u64,
) -> Result<Vec<FrameEstimate>> {
    check_mc(t, n, samples, block_size)?;
    let blocks = samples / block_size;
    let d = 1usize << n;
    let id_rest = DMatrix::<C64>::identity(d / 2, d / 2);
    let choices =
        [id_rest.kronecker(gate.matrix()), id_rest.kronecker(&gate.matrix().adjoint()), DMatrix::<C64>::identity(d, d)];
    let per_block: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b as u64);
            let mut prefixes: Vec<Vec<DMatrix<C64>>> = vec![Vec::with_capacity(block_size); k_max + 1];
            for _ in 0..block_size {
                let mut u = clifford_unitary(n, &mut rng);
                prefixes[0].push(u.clone());
                for prefix in prefixes.iter_mut().skip(1) {
                    u *= &choices[rng.random_range(0..3)];
                    prefix.push(u.clone());
                    u *= clifford_unitary(n, &mut rng);
                }
            }
            prefixes.iter().map(|us| block_pair_mean(t, us)).collect()
        })
        .collect();
    Ok((0..=k_max)
        .map(|k| {
            let vals: Vec<f64> = per_block.iter().map(|v| v[k]).collect();
            let (estimate, stderr) = jackknife(&vals);
            FrameEstimate { estimate, stderr, samples: blocks * block_size, blocks }
        })
        .collect())
}

/// Default block size for the pair estimator.
pub const DEFAULT_BLOCK_SIZE: usize = 2000;

/// Frame potential of σ_k with the default block size.
pub fn interleaved_circuit_mc(
    t: usize,
    n: usize,
    gate: &GateK,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<FrameEstimate> {
    let block = DEFAULT_BLOCK_SIZE.min(samples / 2).max(2);
    frame_potential_mc(t, n, &Family::Interleaved { gate: gate.clone(), k }, samples, block, seed)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let m = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / m, rb.iter().sum::<f64>() / m);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
