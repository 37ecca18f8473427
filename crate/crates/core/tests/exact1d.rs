use std::f64::consts::LN_2;

use degenlab_core::exact1d::{
    admissible_theta, bs_density, bs_expectation, bs_solve, euler_solve_exact, gauge_shift, indicial_roots,
    normalizing_gamma, shift_ratios, BSParams, EulerProblem, LowerOrderRatios, Payoff, Regime,
};
use degenlab_core::grid::LogGrid;
use degenlab_core::profile::Profile;
use degenlab_core::LabError;
use proptest::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, LogNormal, Normal};

fn grid() -> LogGrid<f64> {
    LogGrid::aligned(-6.0, 6.0, LN_2 / 32.0).unwrap()
}

fn data_problem(ratios: LowerOrderRatios<f64>, a: f64) -> EulerProblem<f64> {
    EulerProblem::new(
        a,
        ratios,
        Profile::indicator_x(1.5, 3.0, 0.7).unwrap(),
        Profile::indicator_x(1.0, 2.0, 1.0).unwrap(),
    )
}

#[test]
fn root_examples() {
    let r = indicial_roots(&LowerOrderRatios::new(0.0f64, 0.0, 0.0)).unwrap();
    assert_eq!((r.alpha, r.beta), (-1.0, 0.0));
    let r = indicial_roots(&LowerOrderRatios::new(0.0f64, 0.0, 2.0)).unwrap();
    assert!((r.alpha + 2.0).abs() < 1e-15 && (r.beta - 1.0).abs() < 1e-15);
    assert!(matches!(indicial_roots(&LowerOrderRatios::new(1.0f64, 0.0, -1.0)), Err(LabError::DegenerateRoots { .. })));
    let w = admissible_theta(&indicial_roots(&LowerOrderRatios::new(0.0f64, 0.0, 2.0)).unwrap(), 3.0).unwrap();
    assert!((w.forbidden()[0] + 6.0).abs() < 1e-14 && (w.forbidden()[1] - 3.0).abs() < 1e-14);
    assert_eq!(w.regime(0.0).unwrap(), Regime::Inside);
    assert_eq!(w.regime(-7.0).unwrap(), Regime::Below);
    assert_eq!(w.regime(4.0).unwrap(), Regime::Above);
    assert!(matches!(w.regime(3.0), Err(LabError::ForbiddenExponent { .. })));
}

#[test]
fn gauge_examples() {
    let r = shift_ratios(&LowerOrderRatios::zero(), 1.0f64);
    assert_eq!((r.n_b, r.n_bhat, r.n_c), (1.0, 1.0, -2.0));
    let roots = indicial_roots(&r).unwrap();
    assert!((roots.alpha + 2.0).abs() < 1e-12 && (roots.beta + 1.0).abs() < 1e-12);
    assert_eq!(normalizing_gamma(2.0f64, -1.0, &LowerOrderRatios::zero()).unwrap(), 0.0);
    assert_eq!(normalizing_gamma(2.0f64, 1.0, &LowerOrderRatios::zero()).unwrap(), 1.0);
    assert_eq!(normalizing_gamma(3.0f64, 0.0, &LowerOrderRatios::new(1.0, 0.0, 0.0)).unwrap(), 0.5);
}

#[test]
fn closed_forms_for_indicator_data() {
    let pb = EulerProblem::new(1.0, LowerOrderRatios::zero(), Profile::zero(), Profile::indicator_x(1.0, 2.0, 1.0).unwrap());
    let g = grid();
    let below = euler_solve_exact(&pb, 2.0, -3.0, &g).unwrap();
    assert!((below.eval(LN_2).0 - (LN_2 - 1.0)).abs() < 1e-12);
    let above = euler_solve_exact(&pb, 2.0, 0.5, &g).unwrap();
    assert!(above.eval(3f64.ln()).0.abs() < 1e-12);
    // u(x) = x/2 - log 2 for x ≤ 1
    assert!((above.eval(-1.0).0 - ((-1f64).exp() / 2.0 - LN_2)).abs() < 1e-12);
    let zero = EulerProblem::new(1.0, LowerOrderRatios::zero(), Profile::zero(), Profile::zero());
    assert!(euler_solve_exact(&zero, 2.0, -1.0, &g).unwrap().u().is_zero());
    assert!(matches!(euler_solve_exact(&pb, 2.0, 0.0, &g), Err(LabError::ForbiddenExponent { .. })));
}

#[test]
fn weak_residual_small_for_rough_data() {
    let pb = data_problem(LowerOrderRatios::new(0.3, -0.2, 1.1), 1.7);
    for theta in [-8.0, -1.0, 2.5] {
        let sol = euler_solve_exact(&pb, 2.0, theta, &grid()).unwrap();
        for psi in degenlab_core::weighted::random_bump_family::<f64>(5, 20) {
            assert!(sol.weak_residual(&psi).0.abs() < 1e-6, "theta {theta}");
        }
    }
}

#[test]
fn bs_examples() {
    let params = |payoff| BSParams::new(0.2f64, 0.05, 1.0, payoff).unwrap();
    let one = bs_solve(&params(Payoff::Constant(1.0)), 100.0).unwrap();
    assert!((one - (-0.05f64).exp()).abs() < 1e-10);
    let id = bs_solve(&params(Payoff::Identity), 100.0).unwrap();
    assert!((id - 100.0).abs() < 1e-8);
    let call = bs_solve(&params(Payoff::Call(100.0)), 100.0).unwrap();
    assert!((call - 10.4506).abs() < 1e-3);
    assert!(matches!(bs_density(0.0, 1.0, &params(Payoff::Identity)), Err(LabError::DomainError(_))));
    assert!(matches!(bs_density(1.0, -1.0, &params(Payoff::Identity)), Err(LabError::DomainError(_))));
}

fn ratios_strategy() -> impl Strategy<Value = LowerOrderRatios<f64>> {
    (-3.0f64..3.0, -3.0f64..3.0, -4.0f64..4.0).prop_map(|(b, bh, c)| LowerOrderRatios::new(b, bh, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn vieta(r in ratios_strategy()) {
        let b = r.linear_coefficient();
        prop_assume!(b * b + 4.0 * r.n_c > 1e-6);
        let roots = indicial_roots(&r).unwrap();
        prop_assert!(roots.alpha < roots.beta);
        prop_assert!((roots.alpha + roots.beta + b).abs() < 1e-10);
        prop_assert!((roots.alpha * roots.beta + r.n_c).abs() < 1e-10);
    }

    #[test]
    fn shift_composes_to_identity(r in ratios_strategy(), gamma in -3.0f64..3.0) {
        let back = shift_ratios(&shift_ratios(&r, gamma), -gamma);
        prop_assert!((back.n_b - r.n_b).abs() < 1e-12);
        prop_assert!((back.n_bhat - r.n_bhat).abs() < 1e-12);
        prop_assert!((back.n_c - r.n_c).abs() < 1e-12);
    }

    #[test]
    fn shift_moves_roots(r in ratios_strategy(), gamma in -3.0f64..3.0) {
        let b = r.linear_coefficient();
        prop_assume!(b * b + 4.0 * r.n_c > 1e-6);
        let a = indicial_roots(&r).unwrap();
        let s = indicial_roots(&shift_ratios(&r, gamma)).unwrap();
        prop_assert!((s.alpha - (a.alpha - gamma)).abs() < 1e-10);
        prop_assert!((s.beta - (a.beta - gamma)).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_invariance_nodewise(
        r in ratios_strategy(),
        a in 0.5f64..2.0,
        gamma in -1.5f64..2.0,
        p in 2.0f64..4.0,
        regime in 0usize..3,
        d in 0.3f64..2.0,
    ) {
        let b = r.linear_coefficient();
        prop_assume!(b * b + 4.0 * r.n_c > 0.25);
        let pb = data_problem(r, a);
        let roots = pb.roots().unwrap();
        // keep the solution tails resolvable on the grid
        prop_assume!(roots.alpha > -4.0 && roots.beta < 4.0);
        let theta = match regime {
            0 => roots.alpha * p - d,
            1 => 0.5 * (roots.alpha + roots.beta) * p,
            _ => roots.beta * p + d,
        };
        let g = grid();
        let u = euler_solve_exact(&pb, p, theta, &g).unwrap().u().times_power(gamma);
        let v = euler_solve_exact(&gauge_shift(&pb, gamma), p, theta - gamma * p, &g).unwrap().u();
        let scale = u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let diff = u.values().iter().zip(v.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(diff <= 1e-8 * scale, "diff {diff} scale {scale}");
    }

    #[test]
    fn density_matches_lognormal(
        x in 1.0f64..500.0,
        z in -2.5f64..2.5,
        sigma in 0.05f64..1.0,
        r in -0.05f64..0.2,
        h in 0.1f64..3.0,
    ) {
        let params = BSParams::new(sigma, r, h, Payoff::Identity).unwrap();
        let mu = x.ln() + (r - 0.5 * sigma * sigma) * h;
        let scale = sigma * h.sqrt();
        let y = (mu + z * scale).exp();
        let oracle = LogNormal::new(mu, scale).unwrap().pdf(y);
        let ours = bs_density(x, y, &params).unwrap();
        prop_assert!((ours - oracle).abs() <= 1e-12 * oracle.max(1e-300));
    }

    #[test]
    fn call_matches_closed_form(
        x in 50.0f64..150.0,
        k in 60.0f64..140.0,
        sigma in 0.1f64..0.6,
        r in 0.0f64..0.1,
        h in 0.25f64..2.0,
    ) {
        let n = Normal::new(0.0, 1.0).unwrap();
        let sd = sigma * h.sqrt();
        let d1 = ((x / k).ln() + (r + 0.5 * sigma * sigma) * h) / sd;
        let d2 = d1 - sd;
        let oracle = x * n.cdf(d1) - k * (-r * h).exp() * n.cdf(d2);
        let ours = bs_solve(&BSParams::new(sigma, r, h, Payoff::Call(k)).unwrap(), x).unwrap();
        prop_assert!((ours - oracle).abs() <= 1e-6 * x, "{ours} vs {oracle}");
    }

    #[test]
    fn density_normalized(x in 1.0f64..500.0, sigma in 0.05f64..1.0, r in -0.05f64..0.2, h in 0.1f64..3.0) {
        let params = BSParams::new(sigma, r, h, Payoff::Identity).unwrap();
        let mass = bs_expectation(x, &params, |_| 1.0, &[]).unwrap();
        let mean = bs_expectation(x, &params, |y| y, &[]).unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-6);
        prop_assert!((mean / (x * (r * h).exp()) - 1.0).abs() < 1e-6);
    }
}
