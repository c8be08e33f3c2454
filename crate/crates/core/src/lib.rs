//! Entanglement and objective properties of pure states of few-particle
//! systems: distinguishable particles, identical fermions and identical
//! bosons.
//!
//! The crate decides, exactly up to declared numerical thresholds (see
//! [`tol`]), whether the constituents of a pure state are entangled, which
//! sharp or unsharp properties a subsystem objectively possesses, and
//! whether an `N`-fermion state splits into two non-entangled subgroups.

pub mod approx;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod manybody;
pub mod named;
pub mod operators;
pub mod random;
pub mod selftest;
pub mod tol;
pub mod verdicts;

pub use error::{Error, Result};
pub use hilbert::{antisymmetrize, inner, make_factorized, make_factorized_in, permute, symmetrize, ModeSpace, Permutation, Statistics, StateVector};
pub use linalg::{CMatrix, CVector, C64};
pub use tol::Tolerances;
