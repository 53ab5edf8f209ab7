//! Regular continued fractions, the random system with complete connections
//! built on the Gauss map, and the transfer-operator machinery behind the
//! Gauss–Kuzmin theorem.
//!
//! The crate is organised bottom-up:
//!
//! * [`cf`]: digit extraction, the Gauss map, convergents and the backward
//!   chain `s_n = [a_n, ..., a_1]`, both exactly (unbounded rationals) and in
//!   binary64.
//! * [`rscc`]: the point map `u(w, i) = 1/(w + i)`, the kernel
//!   `P_i(w) = (w + 1)/((w + i)(w + i + 1))`, chain simulation and numerical
//!   contraction coefficients.
//! * [`transfer`]: piecewise-linear grid functions, the Markov operator `U`,
//!   the Gauss–Kuzmin recursion for distribution functions and the empirical
//!   geometric rate.
//! * [`measures`]: the Gauss measure, the Lebesgue digit law and the
//!   invariance checks.
//! * [`experiments`]: named, seeded experiments producing [`report::ReportRecord`]s.

pub mod cf;
pub mod error;
pub mod experiments;
pub mod ks;
pub mod measures;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod rscc;
pub mod transfer;

pub use error::{Error, Result};
