use rayon::prelude::*;

use super::elliptic::{estimate_ratio_elliptic, estimate_ratio_fd};
use super::report::{EstimateReport, SolverKind};
use crate::error::Result;
use crate::exact1d::{admissible_theta, EulerProblem};
use crate::fdsolver::EllipticProblem;
use crate::grid::LogGrid;
use crate::scalar::{c, Real};

/// Lattice spacing of the θ sweep.
pub const THETA_STEP: f64 = 0.25;
/// Extra span on each side of the window.
pub const THETA_MARGIN: f64 = 0.5;
/// Lattice points closer than this to an endpoint are dropped.
pub const ENDPOINT_EXCLUSION: f64 = 1e-3;
/// Distances from the endpoint used for the approach, largest first.
pub const APPROACH_EPS: [f64; 3] = [0.1, 0.01, 0.001];
/// Growth factor over the midpoint ratio that counts as blow-up.
pub const BLOWUP_FACTOR: f64 = 10.0;
/// Relative change under which consecutive λ ratios count as stable.
pub const LAMBDA_PLATEAU: f64 = 0.1;

/// Ratios approaching one window endpoint from the inside.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointApproach<T> {
    pub endpoint: T,
    /// `(ε, ratio at endpoint ∓ ε)` for each entry of [`APPROACH_EPS`].
    pub ratios: Vec<(T, T)>,
    /// Ratio at the smallest `ε` over the midpoint ratio.
    pub growth: T,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    /// Sorted by θ, then by λ.
    pub rows: Vec<EstimateReport<T>>,
    /// θ values where the growth criterion fires.
    pub blowup_flags: Vec<T>,
    /// θ sweep: window endpoints and the approach towards each.
    pub endpoints: Vec<EndpointApproach<T>>,
    /// θ sweep: interior lattice points whose ratio exceeds the blow-up
    /// threshold.
    pub spurious: Vec<T>,
    /// Reference ratio (window midpoint for θ, largest λ for λ).
    pub reference_ratio: T,
    /// λ sweep: first λ after which consecutive ratios change by less
    /// than [`LAMBDA_PLATEAU`].
    pub lambda_star: Option<T>,
    /// λ sweep: relative ratio change at the largest λ under one refinement.
    pub refinement_change: Option<T>,
    /// λ sweep: the `λ = 0` run carried a window violation or a
    /// non-finite ratio.
    pub lambda_zero_flagged: bool,
}

impl<T: Real> SweepResult<T> {
    fn empty() -> Self {
        Self {
            rows: Vec::new(),
            blowup_flags: Vec::new(),
            endpoints: Vec::new(),
            spurious: Vec::new(),
            reference_ratio: T::zero(),
            lambda_star: None,
            refinement_change: None,
            lambda_zero_flagged: false,
        }
    }
}

fn sort_rows<T: Real>(rows: &mut [EstimateReport<T>]) {
    rows.sort_by(|a, b| {
        a.theta
            .partial_cmp(&b.theta)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.lambda.partial_cmp(&b.lambda).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// The θ lattice for a window `(lo, hi)`.
pub fn theta_lattice<T: Real>(lo: T, hi: T) -> Vec<T> {
    let step: T = c(THETA_STEP);
    let start = lo - c(THETA_MARGIN);
    let stop = hi + c(THETA_MARGIN) + step * c(1e-9);
    let excl: T = c(ENDPOINT_EXCLUSION);
    (0..)
        .map(|k| start + step * T::from_usize_lossy(k))
        .take_while(|t| *t <= stop)
        .filter(|t| (*t - lo).abs() >= excl && (*t - hi).abs() >= excl)
        .collect()
}

/// Sweeps θ across the window at `λ = 0` and flags endpoints where the
/// estimate ratio grows by [`BLOWUP_FACTOR`] over its midpoint value.
pub fn theta_sweep<T: Real>(problem: &EulerProblem<T>, p: T, grid: &LogGrid<T>, solver: SolverKind) -> Result<SweepResult<T>> {
    let pb = problem.clone().with_lambda(T::zero());
    let window = admissible_theta(&pb.roots()?, p)?;
    let (lo, hi) = (window.lower, window.upper);
    let mid = window.midpoint();
    let lattice = theta_lattice(lo, hi);
    let mut thetas = lattice.clone();
    thetas.push(mid);
    for e in APPROACH_EPS {
        thetas.push(lo + c(e));
        thetas.push(hi - c(e));
    }
    let rows: Vec<EstimateReport<T>> = thetas
        .par_iter()
        .map(|&th| estimate_ratio_elliptic(&pb, p, th, grid, solver))
        .collect::<Result<_>>()?;
    let ratio_at = |th: T| rows.iter().find(|r| r.theta == th).map_or(T::nan(), |r| r.ratio);
    let reference = ratio_at(mid);
    let threshold = reference * c(BLOWUP_FACTOR);
    let mut out = SweepResult::empty();
    for (endpoint, sign) in [(lo, T::one()), (hi, -T::one())] {
        let ratios: Vec<(T, T)> = APPROACH_EPS.iter().map(|&e| (c(e), ratio_at(endpoint + sign * c(e)))).collect();
        let growth = ratios.last().map_or(T::nan(), |r| r.1 / reference);
        let flagged = growth >= c(BLOWUP_FACTOR);
        if flagged {
            out.blowup_flags.push(endpoint);
        }
        out.endpoints.push(EndpointApproach { endpoint, ratios, growth, flagged });
    }
    out.spurious = lattice
        .iter()
        .copied()
        .filter(|&th| th > lo && th < hi && !(ratio_at(th) < threshold))
        .collect();
    out.blowup_flags.extend(out.spurious.iter().copied());
    out.blowup_flags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out.reference_ratio = reference;
    out.rows = rows;
    sort_rows(&mut out.rows);
    Ok(out)
}

/// The default λ grid `{0, 1, 4, ..., 4096}`.
pub fn default_lambdas<T: Real>() -> Vec<T> {
    std::iter::once(T::zero()).chain((0..7).map(|k| T::from_usize_lossy(1 << (2 * k)))).collect()
}

/// Finite-difference estimate ratios over `lambdas` at fixed θ.
pub fn lambda_sweep<T: Real>(
    problem: &EllipticProblem<T>,
    p: T,
    theta: T,
    lambdas: &[T],
    grid: &LogGrid<T>,
) -> Result<SweepResult<T>> {
    let mut rows: Vec<EstimateReport<T>> = lambdas
        .par_iter()
        .map(|&l| {
            let mut pb = problem.clone();
            pb.lambda = l;
            estimate_ratio_fd(&pb, p, theta, grid)
        })
        .collect::<Result<_>>()?;
    sort_rows(&mut rows);
    let mut out = SweepResult::empty();
    let ratios: Vec<T> = rows.iter().map(|r| r.ratio).collect();
    let tol: T = c(LAMBDA_PLATEAU);
    let stable = |j: usize| {
        let (a, b) = (ratios[j], ratios[j + 1]);
        a.is_finite() && b.is_finite() && ((b - a).abs() <= tol * a.abs() || (a == T::zero() && b == T::zero()))
    };
    if ratios.len() >= 2 {
        let mut k = ratios.len() - 1;
        while k > 0 && stable(k - 1) {
            k -= 1;
        }
        if k < ratios.len() - 1 {
            out.lambda_star = Some(rows[k].lambda);
        }
    }
    if let Some(top) = rows.last() {
        let mut pb = problem.clone();
        pb.lambda = top.lambda;
        let fine = estimate_ratio_fd(&pb, p, theta, &grid.refined())?;
        out.refinement_change = Some(if top.ratio == T::zero() && fine.ratio == T::zero() {
            T::zero()
        } else {
            (fine.ratio - top.ratio).abs() / top.ratio.abs()
        });
        out.reference_ratio = top.ratio;
    }
    out.lambda_zero_flagged = rows
        .iter()
        .any(|r| r.lambda == T::zero() && (r.window_violation || !r.ratio.is_finite()));
    if out.lambda_zero_flagged {
        out.blowup_flags.push(theta);
    }
    out.rows = rows;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact1d::LowerOrderRatios;
    use crate::profile::Profile;

    fn problem(ratios: LowerOrderRatios<f64>) -> EulerProblem<f64> {
        EulerProblem::new(1.0, ratios, Profile::zero(), Profile::indicator_x(1.0, 2.0, 1.0).unwrap())
    }

    #[test]
    fn lattice_excludes_endpoints() {
        let l = theta_lattice(-2.0f64, 0.0);
        assert_eq!(l.first().copied(), Some(-2.5));
        assert_eq!(l.last().copied(), Some(0.5));
        assert!(l.iter().all(|t| (t + 2.0).abs() >= 1e-3 && t.abs() >= 1e-3));
        assert_eq!(l.len(), 11);
    }

    #[test]
    fn default_lambda_grid() {
        let l: Vec<f64> = default_lambdas();
        assert_eq!(l, vec![0.0, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0]);
    }

    #[test]
    fn sweep_flags_both_endpoints_p2() {
        let g = LogGrid::aligned(-8.0, 8.0, std::f64::consts::LN_2 / 32.0).unwrap();
        let r = theta_sweep(&problem(LowerOrderRatios::zero()), 2.0, &g, SolverKind::Exact).unwrap();
        assert_eq!(r.blowup_flags.len(), 2, "{:?}", r.endpoints);
        assert!((r.blowup_flags[0] + 2.0).abs() < 1e-12 && r.blowup_flags[1].abs() < 1e-12);
        assert!(r.spurious.is_empty());
        assert!(r.rows.windows(2).all(|w| w[0].theta <= w[1].theta));
    }

    #[test]
    fn zero_data_lambda_sweep() {
        let pb = EllipticProblem::from_euler(&EulerProblem::new(1.0, LowerOrderRatios::zero(), Profile::zero(), Profile::zero()));
        let g = LogGrid::new(-6.0, 6.0, 121).unwrap();
        let r = lambda_sweep(&pb, 2.0, -1.0, &default_lambdas(), &g).unwrap();
        assert!(r.rows.iter().all(|x| x.ratio == 0.0));
        assert_eq!(r.refinement_change, Some(0.0));
    }
}
