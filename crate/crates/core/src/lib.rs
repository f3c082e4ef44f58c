//! Numerical toolkit for convex splitting and one-shot quantum covering.
//!
//! Operators are dense complex matrices (see [`operator`]). On top of that
//! sit the entropic quantities ([`divergences`], [`info`]), the exact
//! convex-splitting error with its one-shot and exponent bounds
//! ([`convex_split`]), and the bounds of the protocols built from it
//! ([`applications`]). [`testkit`] holds seeded instance generators and
//! brute-force oracles.

pub mod error;
pub mod exec;
mod linalg;
pub mod operator;
pub mod divergences;
pub mod info;
pub mod testkit;
pub mod report;
pub mod grid;
pub mod convex_split;
pub mod applications;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use report::BoundReport;
pub use operator::{DensityOperator, EigenDecomposition, HermitianOperator, RawOperator, Test};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
