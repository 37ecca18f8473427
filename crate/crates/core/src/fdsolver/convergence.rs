use super::elliptic::{elliptic_solve_fd, EllipticProblem};
use super::manufactured::{manufactured_problem, ClosedForm};
use super::parabolic::{parabolic_solve_fd, ParabolicOptions, ParabolicProblem, TimeScheme};
use super::coefficients::RoughCoefficients;
use crate::error::Result;
use crate::exact1d::{euler_solve_exact, EulerProblem, LowerOrderRatios};
use crate::grid::{LogGrid, TimeGrid};
use crate::scalar::Real;
use crate::weighted::{lp_theta_norm, Interp, NormSpec, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel<T> {
    /// Mesh size of the level (`h` or `dt`).
    pub h: T,
    pub error: T,
    /// `log₂(err(previous) / err(this))`; absent on the first level or
    /// when either error vanishes.
    pub order: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy<T> {
    pub levels: Vec<ConvergenceLevel<T>>,
    /// Order between the last two levels.
    pub final_order: Option<T>,
    /// Set when the error fails to decrease between some pair of levels.
    pub non_convergence: bool,
}

impl<T: Real> ConvergenceStudy<T> {
    /// Builds orders from `(h, error)` pairs, coarsest first.
    pub fn from_errors(pairs: &[(T, T)]) -> Self {
        let mut levels: Vec<ConvergenceLevel<T>> = Vec::with_capacity(pairs.len());
        let mut non_convergence = false;
        for (k, &(h, error)) in pairs.iter().enumerate() {
            let order = if k == 0 {
                None
            } else {
                let prev = pairs[k - 1].1;
                if error > prev {
                    non_convergence = true;
                }
                (prev > T::zero() && error > T::zero()).then(|| (prev / error).log2())
            };
            levels.push(ConvergenceLevel { h, error, order });
        }
        let final_order = levels.last().and_then(|l| l.order);
        Self { levels, final_order, non_convergence }
    }

    /// Smallest order over all consecutive pairs.
    pub fn min_order(&self) -> Option<T> {
        self.levels.iter().filter_map(|l| l.order).reduce(T::min)
    }
}

fn nodal_difference<T: Real>(a: &SampledFunction<T>, b: &[T]) -> Result<SampledFunction<T>> {
    let d = a.values().iter().zip(b).map(|(x, y)| *x - *y).collect();
    SampledFunction::new(*a.grid(), d, Interp::Linear)
}

/// `levels` successive halvings of `grid`, finest last.
pub fn refinements<T: Real>(grid: &LogGrid<T>, levels: usize) -> Vec<LogGrid<T>> {
    std::iter::successors(Some(*grid), |g| Some(g.refined())).take(levels).collect()
}

/// L_{p,θ} distance between the finite-difference and exact solutions of
/// a constant-coefficient problem, over `levels` dyadic refinements.
pub fn exact_oracle_study<T: Real>(
    problem: &EulerProblem<T>,
    p: T,
    theta: T,
    grid: &LogGrid<T>,
    levels: usize,
) -> Result<ConvergenceStudy<T>> {
    let spec = NormSpec::new(p, theta)?;
    let fd = EllipticProblem::from_euler(problem);
    let mut pairs = Vec::with_capacity(levels);
    for g in refinements(grid, levels) {
        let exact = euler_solve_exact(problem, p, theta, &g)?.u();
        let approx = elliptic_solve_fd(&fd, &g, p, theta)?.solution;
        pairs.push((g.h(), lp_theta_norm(&nodal_difference(&approx, exact.values())?, &spec)?));
    }
    Ok(ConvergenceStudy::from_errors(&pairs))
}

/// As [`exact_oracle_study`] for data manufactured from `u`.
#[allow(clippy::too_many_arguments)]
pub fn manufactured_study<T: Real>(
    u: &ClosedForm<T>,
    coeffs: &RoughCoefficients<T>,
    ratios: &LowerOrderRatios<T>,
    lambda: T,
    p: T,
    theta: T,
    grid: &LogGrid<T>,
    levels: usize,
) -> Result<ConvergenceStudy<T>> {
    let spec = NormSpec::new(p, theta)?;
    let (big_f, f) = manufactured_problem(u, coeffs, ratios, lambda)?;
    let pb = EllipticProblem::new(coeffs.clone(), *ratios, lambda, big_f, f);
    let mut pairs = Vec::with_capacity(levels);
    for g in refinements(grid, levels) {
        let approx = elliptic_solve_fd(&pb, &g, p, theta)?.solution;
        let exact: Vec<T> = g.nodes().into_iter().map(|s| u.eval(s)).collect();
        pairs.push((g.h(), lp_theta_norm(&nodal_difference(&approx, &exact)?, &spec)?));
    }
    Ok(ConvergenceStudy::from_errors(&pairs))
}

/// Temporal self-convergence: L_{p,θ} distance at `t = T` between runs
/// with `m` and `2m` steps, for `m = steps, 2 steps, ...`.
#[allow(clippy::too_many_arguments)]
pub fn temporal_study<T: Real>(
    problem: &ParabolicProblem<T>,
    grid: &LogGrid<T>,
    t_end: T,
    steps: usize,
    levels: usize,
    scheme: TimeScheme,
    p: T,
    theta: T,
) -> Result<ConvergenceStudy<T>> {
    let spec = NormSpec::new(p, theta)?;
    let opts = ParabolicOptions { scheme, ..Default::default() };
    let mut tg = TimeGrid::new(t_end, steps)?;
    let mut prev = parabolic_solve_fd(problem, grid, &tg, p, theta, opts)?.solution;
    let mut pairs = Vec::with_capacity(levels);
    for _ in 0..levels {
        let dt = tg.dt();
        tg = tg.refined();
        let next = parabolic_solve_fd(problem, grid, &tg, p, theta, opts)?.solution;
        pairs.push((dt, lp_theta_norm(&nodal_difference(&prev, next.values())?, &spec)?));
        prev = next;
    }
    Ok(ConvergenceStudy::from_errors(&pairs))
}
