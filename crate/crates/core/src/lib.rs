//! Numerical laboratory for degenerate elliptic and parabolic equations on
//! the half line: weighted Sobolev norms in logarithmic coordinates, closed
//! form and finite-difference solvers, estimate verification, and an
//! interval covering algorithm.

pub mod error;
pub mod exact1d;
pub mod fdsolver;
pub mod grid;
pub mod inkspots;
pub mod profile;
pub mod quadrature;
pub mod scalar;
pub mod tridiag;
pub mod verifier;
pub mod weighted;

pub use error::{LabError, Result};
pub use scalar::Real;

/// Double-precision aliases for the generic types.
pub type LogGrid64 = grid::LogGrid<f64>;
pub type TimeGrid64 = grid::TimeGrid<f64>;
pub type Profile64 = profile::Profile<f64>;
pub type SampledFunction64 = weighted::SampledFunction<f64>;
pub type NormSpec64 = weighted::NormSpec<f64>;
pub type EulerProblem64 = exact1d::EulerProblem<f64>;
pub type EllipticProblem64 = fdsolver::EllipticProblem<f64>;
pub type ParabolicProblem64 = fdsolver::ParabolicProblem<f64>;
pub type EstimateReport64 = verifier::EstimateReport<f64>;
pub type IntervalSet64 = inkspots::IntervalSet<f64>;

/// Single-precision aliases for the grid and sampled functions.
pub type LogGrid32 = grid::LogGrid<f32>;
pub type SampledFunction32 = weighted::SampledFunction<f32>;
