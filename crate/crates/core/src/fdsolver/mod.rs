//! Finite-difference solvers in `s = log x` for the degenerate elliptic
//! and parabolic equations, manufactured data, and convergence studies.

mod coefficients;
mod convergence;
mod elliptic;
mod manufactured;
mod parabolic;

pub use coefficients::{PiecewiseConstant, RoughCoefficients, Variable};
pub use convergence::{
    exact_oracle_study, manufactured_study, refinements, temporal_study, ConvergenceLevel, ConvergenceStudy,
};
pub use elliptic::{assemble_operator, elliptic_solve_fd, weak_load, EllipticProblem};
pub use manufactured::{manufactured_from_samples, manufactured_parabolic, manufactured_problem, ClosedForm};
pub use parabolic::{
    parabolic_solve_fd, ParabolicOptions, ParabolicProblem, ParabolicReport, SpaceTimeData, TimeFn, TimeScheme,
};

pub use crate::grid::{build_log_grid, LogGrid, TimeGrid};

use crate::weighted::SampledFunction;

/// Output of a stationary solve.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solution: SampledFunction<T>,
    /// `max |A v - b| / max |b|` for the assembled system.
    pub residual_norm: T,
    /// Direct factorization used; there are no iterations.
    pub factorization: &'static str,
    /// Bound on the relative effect of the Dirichlet truncation.
    pub truncation_certificate: T,
    /// `λ = 0` with `θ` outside the admissible window.
    pub window_violation: bool,
}
