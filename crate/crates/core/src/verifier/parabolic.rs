use super::elliptic::solution_norms;
use super::report::{EstimateReport, SolverKind};
use crate::error::Result;
use crate::fdsolver::{parabolic_solve_fd, ParabolicOptions, ParabolicProblem};
use crate::grid::{LogGrid, TimeGrid};
use crate::scalar::{c, Real};

/// Time-integrated estimate ratio with `q = p` and unit time weight.
///
/// Space norms are taken on every time level and combined with the
/// trapezoidal rule; the data are evaluated at the same levels.
pub fn estimate_ratio_parabolic<T: Real>(
    problem: &ParabolicProblem<T>,
    p: T,
    theta: T,
    grid: &LogGrid<T>,
    tg: &TimeGrid<T>,
    options: ParabolicOptions,
) -> Result<EstimateReport<T>> {
    let opts = ParabolicOptions { keep_history: true, ..options };
    let rep = parabolic_solve_fd(problem, grid, tg, p, theta, opts)?;
    let history = rep.history.unwrap_or_default();
    let dt = tg.dt();
    let last = history.len().saturating_sub(1);
    let weight = |k: usize| if k == 0 || k == last { dt * c(0.5) } else { dt };
    let (mut su, mut sd, mut sf, mut sff) = (T::zero(), T::zero(), T::zero(), T::zero());
    for (k, u) in history.iter().enumerate() {
        let w = weight(k);
        let (nu, nd) = solution_norms(u, p, theta)?;
        let t = tg.t(k);
        let nf = problem.big_f.at(t).weighted_lp(p, theta - p)?;
        let nff = problem.f.at(t).weighted_lp(p, theta)?;
        su += w * nu.powf(p);
        sd += w * nd.powf(p);
        sf += w * nf.powf(p);
        sff += w * nff.powf(p);
    }
    let r = p.recip();
    let mut out = EstimateReport::assemble(
        su.powf(r),
        sd.powf(r),
        sf.powf(r),
        sff.powf(r),
        p,
        theta,
        problem.lambda,
        format!("{};T={};m={}", grid.id(), tg.t_end(), tg.steps()),
        problem.coeffs.id(),
        SolverKind::Fd,
    );
    out.window_violation = rep.window_violation;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact1d::LowerOrderRatios;
    use crate::fdsolver::{RoughCoefficients, SpaceTimeData};
    use crate::profile::Profile;

    #[test]
    fn zero_data_zero_ratio() {
        let pb = ParabolicProblem::new(
            RoughCoefficients::constant(1.0f64),
            LowerOrderRatios::zero(),
            0.0,
            SpaceTimeData::zero(),
            SpaceTimeData::zero(),
        );
        let g = LogGrid::new(-6.0, 6.0, 121).unwrap();
        let tg = TimeGrid::new(1.0, 8).unwrap();
        let r = estimate_ratio_parabolic(&pb, 2.0, -1.0, &g, &tg, ParabolicOptions::default()).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn stationary_source_finite_ratio() {
        let f = Profile::smooth_s(|s: f64| (-(s - 0.3) * (s - 0.3) * 4.0).exp(), -2.0, 2.6);
        let pb = ParabolicProblem::new(
            RoughCoefficients::constant(0.5),
            LowerOrderRatios::zero(),
            0.0,
            SpaceTimeData::zero(),
            SpaceTimeData::stationary(f),
        );
        let g = LogGrid::new(-10.0, 10.0, 401).unwrap();
        let r1 = estimate_ratio_parabolic(&pb, 2.0, -1.0, &g, &TimeGrid::new(1.0, 32).unwrap(), ParabolicOptions::default()).unwrap();
        let r2 = estimate_ratio_parabolic(&pb, 2.0, -1.0, &g.refined(), &TimeGrid::new(1.0, 64).unwrap(), ParabolicOptions::default()).unwrap();
        assert!(r1.ratio.is_finite() && r1.ratio > 0.0);
        assert!((r1.ratio - r2.ratio).abs() < 0.05 * r2.ratio, "{} vs {}", r1.ratio, r2.ratio);
    }
}
