//! Numerical machinery for unitary t-designs built from Clifford circuits
//! interleaved with a few non-Clifford gates.
//!
//! The crate is layered bottom-up:
//!
//! - [`gf2`]: bit-packed linear algebra over F₂.
//! - [`lagrangian`]: stochastic Lagrangian subspaces Σ_{t,t}, the stochastic
//!   orthogonal group O_t and defect subspaces.
//! - [`operators`]: dense realizations of r(T), CSS projectors and the
//!   Haar/diagonal symmetrizers on t copies of a qubit.
//! - [`hamming`]: exact weight-preservation probabilities.
//! - [`commutant`]: Gram-matrix algebra of the Clifford commutant basis.
//! - [`moments`]: small-basis convergence of K-interleaved Clifford circuits.
//! - [`stabilizer`]: tableaux, uniform Clifford sampling and dense oracles.

pub mod commutant;
pub mod error;
pub mod gf2;
pub mod hamming;
pub mod lagrangian;
pub mod moments;
pub mod operators;
pub mod stabilizer;

pub use error::{Error, Result};
