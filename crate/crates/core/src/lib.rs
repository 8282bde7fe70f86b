//! Exact iterated sumsets, difference, product and distance sets of finite
//! rational sets, together with certificate-producing verifiers for the
//! convex squeezing lower bounds built on them.

// Errors carry exact rational bounds; they are rare and off the hot paths.
#![allow(clippy::result_large_err)]

pub mod cli;
pub mod convex;
pub mod families;
pub mod numset;
pub mod report;
pub mod scalar;
pub mod squeeze;
pub mod verify;

pub use numset::{CardinalityGuard, NumSet, SetError};
pub use scalar::Scalar;
