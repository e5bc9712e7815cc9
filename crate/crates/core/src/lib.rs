//! Convergence-rate bounds for Markov chains built from drift and minorization
//! conditions, lower limits on how good any such bound can be, and exact
//! finite-state oracles to check both against.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: normal and chi-square distribution functions, guarded floors
//!   and a grid-plus-golden-section scalar minimiser.
//! * [`bounds`]: closed-form upper bounds and the matching optimal-bound floors.
//! * [`chain`]: finite transition matrices, stationary laws, true rates,
//!   condition verifiers and witness chains.
//! * [`gaussian_ar`] and [`mala`]: the two continuous-state case studies.

pub mod bounds;
pub mod chain;
pub mod error;
pub mod gaussian_ar;
pub mod mala;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::{Interval, Probability};
