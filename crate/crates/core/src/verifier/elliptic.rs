use super::report::{EstimateReport, SolverKind};
use crate::error::Result;
use crate::exact1d::{admissible_theta, euler_solve_exact, EulerProblem};
use crate::fdsolver::{elliptic_solve_fd, EllipticProblem};
use crate::grid::LogGrid;
use crate::profile::Profile;
use crate::scalar::Real;
use crate::weighted::{lp_theta_norm, NormSpec, SampledFunction};

/// `(‖x⁻¹F‖_{L_{p,θ}}, ‖f‖_{L_{p,θ}})` computed from the profiles.
pub fn data_norms<T: Real>(big_f: &Profile<T>, f: &Profile<T>, p: T, theta: T) -> Result<(T, T)> {
    Ok((big_f.weighted_lp(p, theta - p)?, f.weighted_lp(p, theta)?))
}

/// `(‖u‖, ‖x Du‖)` of a grid function in `L_{p,θ}`.
pub fn solution_norms<T: Real>(u: &SampledFunction<T>, p: T, theta: T) -> Result<(T, T)> {
    let spec = NormSpec::new(p, theta)?;
    Ok((lp_theta_norm(u, &spec)?, lp_theta_norm(&u.log_derivative(), &spec)?))
}

/// Estimate ratio for a constant-coefficient problem solved exactly,
/// including the closed-form tails beyond the grid.
pub fn estimate_ratio_exact<T: Real>(problem: &EulerProblem<T>, p: T, theta: T, grid: &LogGrid<T>) -> Result<EstimateReport<T>> {
    let sol = euler_solve_exact(problem, p, theta, grid)?;
    let (u, xdu) = sol.norms()?;
    let (nf, nff) = data_norms(&problem.big_f, &problem.f, p, theta)?;
    let mut rep = EstimateReport::assemble(
        u,
        xdu,
        nf,
        nff,
        p,
        theta,
        problem.lambda,
        grid.id(),
        format!("a={}", problem.a),
        SolverKind::Exact,
    );
    rep.regime = Some(sol.regime());
    Ok(rep)
}

/// Estimate ratio for the finite-difference solution.
pub fn estimate_ratio_fd<T: Real>(problem: &EllipticProblem<T>, p: T, theta: T, grid: &LogGrid<T>) -> Result<EstimateReport<T>> {
    let sol = elliptic_solve_fd(problem, grid, p, theta)?;
    let (u, xdu) = solution_norms(&sol.solution, p, theta)?;
    let (nf, nff) = data_norms(&problem.big_f, &problem.f, p, theta)?;
    let mut rep = EstimateReport::assemble(
        u,
        xdu,
        nf,
        nff,
        p,
        theta,
        problem.lambda,
        grid.id(),
        problem.coeffs.id(),
        SolverKind::Fd,
    );
    rep.window_violation = sol.window_violation;
    rep.regime = crate::exact1d::indicial_roots(&problem.ratios)
        .and_then(|r| admissible_theta(&r, p))
        .and_then(|w| w.regime(theta))
        .ok();
    Ok(rep)
}

/// Dispatches to [`estimate_ratio_exact`] or [`estimate_ratio_fd`].
pub fn estimate_ratio_elliptic<T: Real>(
    problem: &EulerProblem<T>,
    p: T,
    theta: T,
    grid: &LogGrid<T>,
    solver: SolverKind,
) -> Result<EstimateReport<T>> {
    match solver {
        SolverKind::Exact => estimate_ratio_exact(problem, p, theta, grid),
        SolverKind::Fd => estimate_ratio_fd(&EllipticProblem::from_euler(problem), p, theta, grid),
    }
}
