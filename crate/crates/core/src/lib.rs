//! A desk-scale quantum property testing laboratory.
//!
//! The crate bundles a small oracle-query state-vector simulator, exact
//! classical and quantum testers for subsets of the Hadamard code and for
//! the language of Simon-invariant functions, brute-force distance
//! oracles, an explicit d-wise independent sample space, and a seeded
//! experiment harness.
//!
//! Numerical code is generic over [`Real`]; the aliases below fix the
//! double-precision instantiations used by the testers.

pub mod dwise;
pub mod error;
pub mod f2core;
pub mod hadamard_tester;
pub mod harness;
pub mod qsim;
mod scalar;
pub mod simon_tester;

pub use error::{Error, Result};
pub use f2core::{BitString, Basis, BooleanFunction, PropertySpec};
pub use scalar::Real;

/// Double-precision workspace state.
pub type State = qsim::QuantumState<f64>;
/// Single-precision workspace state.
pub type StateF32 = qsim::QuantumState<f32>;
/// Double-precision outcome distribution.
pub type Distribution = qsim::OutcomeDistribution<f64>;
/// Monomial expectations computed in exact rational arithmetic.
pub type ExactGap = dwise::MonomialGap<num_rational::Rational64>;
/// Monomial expectations in floating point.
pub type FloatGap = dwise::MonomialGap<f64>;
