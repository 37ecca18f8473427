use std::f64::consts::LN_2;
use std::sync::Arc;

use degenlab_core::exact1d::{EulerProblem, LowerOrderRatios};
use degenlab_core::fdsolver::{
    build_log_grid, elliptic_solve_fd, exact_oracle_study, manufactured_problem, manufactured_study, parabolic_solve_fd,
    temporal_study, ClosedForm, EllipticProblem, LogGrid, ParabolicOptions, ParabolicProblem, PiecewiseConstant,
    RoughCoefficients, SpaceTimeData, TimeGrid, TimeScheme,
};
use degenlab_core::profile::Profile;
use degenlab_core::LabError;
use proptest::prelude::*;

fn rough(lo: f64, hi: f64) -> RoughCoefficients<f64> {
    let mut c = RoughCoefficients::constant(1.0);
    c.a = PiecewiseConstant::two_phase(lo, hi, -2.0, 0.5, 8).unwrap();
    c.nu = lo.min(1.0 / hi);
    c
}

#[test]
fn log_grid_examples() {
    let g = build_log_grid((-1f64).exp(), 1f64.exp(), 3).unwrap();
    assert_eq!(g.nodes(), vec![-1.0, 0.0, 1.0]);
    assert!(matches!(build_log_grid(1.0f64, 1.0, 64), Err(LabError::InvalidGrid(_))));
    let g = build_log_grid(1e-4f64, 1e4, 1025).unwrap();
    assert!((g.h() - 8.0 * 10f64.ln() / 1024.0).abs() < 1e-14);
    assert!(matches!(TimeGrid::new(1.0f64, 2), Err(LabError::InvalidGrid(_))));
}

#[test]
fn zero_data_zero_solution() {
    let pb = EllipticProblem::new(RoughCoefficients::constant(1.0), LowerOrderRatios::zero(), 1.0, Profile::zero(), Profile::zero());
    let rep = elliptic_solve_fd(&pb, &LogGrid::new(-6.0, 6.0, 257).unwrap(), 2.0, -1.0).unwrap();
    assert!(rep.solution.is_zero());
    assert_eq!(rep.residual_norm, 0.0);
}

#[test]
fn manufactured_gaussian_order() {
    let g = LogGrid::new(-8.0, 8.0, 129).unwrap();
    for (coeffs, ratios, lambda) in [
        (RoughCoefficients::constant(1.0), LowerOrderRatios::zero(), 1.0),
        (RoughCoefficients::constant(1.7), LowerOrderRatios::new(0.4, -0.3, 0.5), 2.0),
    ] {
        let s = manufactured_study(&ClosedForm::gaussian(6.5), &coeffs, &ratios, lambda, 2.0, -1.0, &g, 4).unwrap();
        assert!(s.min_order().unwrap() >= 1.9, "{s:?}");
        assert!(!s.non_convergence);
    }
}

#[test]
fn indicator_data_oracle_order() {
    let pb = EulerProblem::new(1.0, LowerOrderRatios::zero(), Profile::zero(), Profile::indicator_x(1.0, 2.0, 1.0).unwrap());
    for theta in [-1.25, -1.0, -0.75] {
        let g = LogGrid::aligned(-40.0, 40.0, LN_2 / 16.0).unwrap();
        let s = exact_oracle_study(&pb, 2.0, theta, &g, 3).unwrap();
        assert!(s.min_order().unwrap() >= 0.9, "theta {theta}: {s:?}");
    }
}

#[test]
fn zero_problem_zero_errors() {
    let g = LogGrid::new(-8.0, 8.0, 129).unwrap();
    let s = manufactured_study(&ClosedForm::zero(), &RoughCoefficients::constant(1.0), &LowerOrderRatios::zero(), 1.0, 2.0, -1.0, &g, 3)
        .unwrap();
    assert!(s.levels.iter().all(|l| l.error == 0.0 && l.order.is_none()));
}

#[test]
fn rough_coefficient_self_convergence() {
    let f = Profile::indicator_x(0.5, 3.0, 1.0).unwrap();
    let pb = EllipticProblem::new(rough(0.25, 4.0), LowerOrderRatios::zero(), 1.0, Profile::zero(), f);
    let base = LogGrid::aligned(-12.0, 12.0, 0.125).unwrap();
    let solve = |g: &LogGrid<f64>| elliptic_solve_fd(&pb, g, 2.0, -1.0).unwrap().solution;
    let reference = solve(&base.refined().refined().refined().refined());
    let errors: Vec<f64> = (0..3)
        .map(|k| {
            let g = (0..k).fold(base, |g, _| g.refined());
            let u = solve(&g);
            g.nodes().iter().zip(u.values()).fold(0.0f64, |m, (s, v)| m.max((v - reference.eval_s(*s)).abs()))
        })
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < 0.6 * e[0]), "{errors:?}");
}

#[test]
fn manufactured_is_linear() {
    let u1 = ClosedForm::gaussian(6.0);
    let u2 = ClosedForm::bump(0.5, 2.0);
    let coeffs = RoughCoefficients::constant(1.3);
    let ratios = LowerOrderRatios::new(0.2, 0.1, -0.3);
    let (bf, f) = manufactured_problem(&u1.plus(&u2), &coeffs, &ratios, 2.0).unwrap();
    let (bf1, f1) = manufactured_problem(&u1, &coeffs, &ratios, 2.0).unwrap();
    let (bf2, f2) = manufactured_problem(&u2, &coeffs, &ratios, 2.0).unwrap();
    for k in 0..200 {
        let s = -5.0 + 0.05 * f64::from(k);
        assert!((f.eval(s) - f1.eval(s) - f2.eval(s)).abs() < 1e-12);
        assert!((bf.eval(s) - bf1.eval(s) - bf2.eval(s)).abs() < 1e-12);
    }
    let (z0, z1) = manufactured_problem(&ClosedForm::zero(), &coeffs, &ratios, 2.0).unwrap();
    assert!((-50..50).all(|k| z0.eval(0.1 * f64::from(k)) == 0.0 && z1.eval(0.1 * f64::from(k)) == 0.0));
}

#[test]
fn parabolic_zero_data() {
    let pb = ParabolicProblem::new(RoughCoefficients::constant(1.0), LowerOrderRatios::zero(), 0.0, SpaceTimeData::zero(), SpaceTimeData::zero());
    let rep = parabolic_solve_fd(&pb, &LogGrid::new(-6.0, 6.0, 129).unwrap(), &TimeGrid::new(1.0, 8).unwrap(), 2.0, -1.0, ParabolicOptions::default())
        .unwrap();
    assert!(rep.solution.is_zero());
}

#[test]
fn temporal_orders() {
    let profile = Profile::smooth_s(|s: f64| (-s * s).exp(), -5.0, 5.0);
    let f = SpaceTimeData::separable(Arc::new(|t: f64| t), profile);
    let pb = ParabolicProblem::new(RoughCoefficients::constant(1.0), LowerOrderRatios::zero(), 1.0, SpaceTimeData::zero(), f);
    let g = LogGrid::new(-8.0, 8.0, 257).unwrap();
    let cn = temporal_study(&pb, &g, 1.0, 8, 3, TimeScheme::CrankNicolson, 2.0, -1.0).unwrap();
    assert!(cn.min_order().unwrap() >= 1.9, "{cn:?}");
    let ie = temporal_study(&pb, &g, 1.0, 8, 3, TimeScheme::ImplicitEuler, 2.0, -1.0).unwrap();
    assert!(ie.min_order().unwrap() >= 0.9, "{ie:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn discrete_positivity(
        x0 in 0.2f64..3.0,
        len in 0.1f64..3.0,
        amp in 0.1f64..10.0,
        lambda in 0.1f64..10.0,
        lo in 0.2f64..1.0,
        hi in 1.0f64..5.0,
        n_b in -1.0f64..1.0,
    ) {
        let f = Profile::indicator_x(x0, x0 + len, amp).unwrap();
        let pb = EllipticProblem::new(rough(lo, hi), LowerOrderRatios::new(n_b, 0.0, 0.0), lambda, Profile::zero(), f);
        let rep = elliptic_solve_fd(&pb, &LogGrid::new(-10.0, 10.0, 641).unwrap(), 2.0, -1.0).unwrap();
        let vals = rep.solution.values();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(scale > 0.0);
        prop_assert!(vals.iter().all(|v| *v >= -1e-10 * scale));
        prop_assert!(rep.residual_norm < 1e-10);
        prop_assert!(rep.truncation_certificate > 0.0 && rep.truncation_certificate < 1.0);
    }
}
