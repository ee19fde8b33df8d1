//! Relational quantum reference frames over finite groups.
//!
//! Builds physical (group-invariant) states on `R1 ⊗ ... ⊗ RN ⊗ S`, reduces
//! them to the perspective of individual frames, and evaluates the diagonal
//! Rényi invariants, the observer-dependent entropy decomposition and the
//! effective-dimension bound for non-ideal frames. The [`verify`] module
//! samples states and checks all of these numerically.

// `!(x > 0.0)` is used deliberately so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod entropy;
pub mod error;
pub mod group;
pub mod irreps;
pub mod relational;
pub mod reps;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
