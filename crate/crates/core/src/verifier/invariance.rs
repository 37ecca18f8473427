use super::elliptic::estimate_ratio_elliptic;
use super::report::SolverKind;
use crate::error::Result;
use crate::exact1d::{euler_solve_exact, gauge_shift, EulerProblem};
use crate::fdsolver::{elliptic_solve_fd, EllipticProblem};
use crate::grid::LogGrid;
use crate::scalar::{c, Real};
use crate::weighted::{lp_theta_norm, Interp, NormSpec, SampledFunction};

/// Relative tolerance for checks on the exact solver.
pub const EXACT_TOL: f64 = 1e-8;
/// Finite-difference checks pass below `FD_CONSTANT · h²`.
pub const FD_CONSTANT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceCheck<T> {
    /// `γ` for gauge checks, the dilation factor for scaling checks.
    pub parameter: T,
    /// Largest nodal difference relative to the largest nodal value.
    pub nodal_rel_diff: T,
    /// `L_{p,θ}` norm of the difference relative to the norm of the
    /// reference solution.
    pub weighted_rel_diff: T,
    /// Relative difference of the compared scalar (`‖u‖` for gauge,
    /// the estimate ratio for scaling).
    pub scalar_rel_diff: T,
    pub tolerance: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport<T> {
    pub checks: Vec<InvarianceCheck<T>>,
    pub solver: SolverKind,
    pub passed: bool,
}

impl<T: Real> InvarianceReport<T> {
    fn new(checks: Vec<InvarianceCheck<T>>, solver: SolverKind) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { checks, solver, passed }
    }
}

fn tolerance<T: Real>(solver: SolverKind, grid: &LogGrid<T>) -> T {
    match solver {
        SolverKind::Exact => c(EXACT_TOL),
        SolverKind::Fd => c::<T>(FD_CONSTANT) * grid.h() * grid.h(),
    }
}

fn rel<T: Real>(a: T, b: T) -> T {
    let d = (a - b).abs();
    if d == T::zero() {
        T::zero()
    } else {
        d / a.abs().max(b.abs())
    }
}

fn nodal_rel<T: Real>(a: &[T], b: &[T]) -> T {
    let scale = a.iter().chain(b).fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs())) / scale
}

fn weighted_rel<T: Real>(reference: &SampledFunction<T>, got: &SampledFunction<T>, spec: &NormSpec<T>) -> Result<T> {
    let d: Vec<T> = reference.values().iter().zip(got.values()).map(|(a, b)| *a - *b).collect();
    let num = lp_theta_norm(&SampledFunction::new(*reference.grid(), d, Interp::Linear)?, spec)?;
    let den = lp_theta_norm(reference, spec)?;
    Ok(if num == T::zero() { T::zero() } else { num / den })
}

/// Exact checks compare nodes, finite-difference checks the weighted norm
/// (the truncation error at the grid ends is not uniformly small after a
/// gauge change).
fn verdict<T: Real>(solver: SolverKind, nodal: T, weighted: T, scalar: T, tol: T) -> bool {
    let field = match solver {
        SolverKind::Exact => nodal,
        SolverKind::Fd => weighted,
    };
    field <= tol && scalar <= tol
}

fn solve<T: Real>(problem: &EulerProblem<T>, p: T, theta: T, grid: &LogGrid<T>, solver: SolverKind) -> Result<SampledFunction<T>> {
    match solver {
        SolverKind::Exact => Ok(euler_solve_exact(problem, p, theta, grid)?.u()),
        SolverKind::Fd => Ok(elliptic_solve_fd(&EllipticProblem::from_euler(problem), grid, p, theta)?.solution),
    }
}

/// Solves the gauge-shifted problem at `θ - γp` and compares it with
/// `x^γ u` nodewise and in `L_{p,θ-γp}` norm.
pub fn gauge_invariance_check<T: Real>(
    problem: &EulerProblem<T>,
    gammas: &[T],
    p: T,
    theta: T,
    grid: &LogGrid<T>,
    solver: SolverKind,
) -> Result<InvarianceReport<T>> {
    let base = solve(problem, p, theta, grid, solver)?;
    let tol = tolerance(solver, grid);
    let mut checks = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let shifted_theta = theta - gamma * p;
        let expected = base.times_power(gamma);
        let got = solve(&gauge_shift(problem, gamma), p, shifted_theta, grid, solver)?;
        let spec = NormSpec::new(p, shifted_theta)?;
        let nodal = nodal_rel(expected.values(), got.values());
        let weighted = weighted_rel(&expected, &got, &spec)?;
        let scalar = rel(lp_theta_norm(&expected, &spec)?, lp_theta_norm(&got, &spec)?);
        checks.push(InvarianceCheck {
            parameter: gamma,
            nodal_rel_diff: nodal,
            weighted_rel_diff: weighted,
            scalar_rel_diff: scalar,
            tolerance: tol,
            passed: verdict(solver, nodal, weighted, scalar, tol),
        });
    }
    Ok(InvarianceReport::new(checks, solver))
}

/// Solves the problem with data `F(σ·)/σ, f(σ·)` on the grid shifted by
/// `-log σ` and compares nodal values and estimate ratios.
pub fn scaling_invariance_check<T: Real>(
    problem: &EulerProblem<T>,
    sigmas: &[T],
    p: T,
    theta: T,
    grid: &LogGrid<T>,
    solver: SolverKind,
) -> Result<InvarianceReport<T>> {
    let base = solve(problem, p, theta, grid, solver)?;
    let base_ratio = estimate_ratio_elliptic(problem, p, theta, grid, solver)?.ratio;
    let tol = tolerance(solver, grid);
    let spec = NormSpec::new(p, theta)?;
    let mut checks = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let g = grid.shifted(-sigma.ln());
        let dilated = problem.dilated(sigma);
        let got = solve(&dilated, p, theta, &g, solver)?;
        let ratio = estimate_ratio_elliptic(&dilated, p, theta, &g, solver)?.ratio;
        let nodal = nodal_rel(base.values(), got.values());
        // node j of the shifted grid carries the value of node j of the base grid
        let moved = SampledFunction::new(g, base.values().to_vec(), Interp::Linear)?;
        let weighted = weighted_rel(&moved, &got, &spec)?;
        let scalar = rel(base_ratio, ratio);
        checks.push(InvarianceCheck {
            parameter: sigma,
            nodal_rel_diff: nodal,
            weighted_rel_diff: weighted,
            scalar_rel_diff: scalar,
            tolerance: tol,
            passed: verdict(solver, nodal, weighted, scalar, tol),
        });
    }
    Ok(InvarianceReport::new(checks, solver))
}
