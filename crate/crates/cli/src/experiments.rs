//! One runner per experiment kind, each returning rows in parameter order
//! and a JSON summary.

use rayon::prelude::*;
use serde_json::{json, Value as Json};

use degenlab_core::exact1d::{admissible_theta, bs_solve, euler_solve_exact, BSParams, Payoff};
use degenlab_core::fdsolver::{
    elliptic_solve_fd, exact_oracle_study, manufactured_study, parabolic_solve_fd, temporal_study, ClosedForm,
    ConvergenceStudy, EllipticProblem, ParabolicOptions, ParabolicProblem, PiecewiseConstant, RoughCoefficients,
    SpaceTimeData, TimeScheme, Variable,
};
use degenlab_core::grid::{LogGrid, TimeGrid};
use degenlab_core::inkspots::{
    doubling_check, evaluate_lemma, random_interval_set, select_cover, DoublingOutcome, InkConstants, IntervalSet,
};
use degenlab_core::profile::Profile;
use degenlab_core::verifier::{lambda_sweep, theta_sweep, EstimateReport, SolverKind};
use degenlab_core::weighted::{
    ap_constant_estimate, build_cutoff, dyadic_norm, h1_theta_norm, hardy_check, lp_theta_norm, random_bump_family,
    NormSpec, SampledFunction, TimeWeight,
};
use degenlab_core::{LabError, Result};

use crate::config::{
    pieces, regime_str, CoefficientVariable, ExperimentConfig, Family, PayoffKind, ProblemConfig, Scheme, Solver, Study,
};
use crate::output::Row;

pub type Outcome = (Vec<Row>, Json);

/// Sorted, deduplicated copy.
fn sorted(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn grid(cfg: &ExperimentConfig, lo: f64, hi: f64, n: usize) -> Result<LogGrid<f64>> {
    match cfg.grid {
        Some(g) => match (g.n, g.h) {
            (Some(n), _) => LogGrid::new(g.s_min, g.s_max, n),
            (None, Some(h)) => LogGrid::aligned(g.s_min, g.s_max, h),
            (None, None) => Err(LabError::InvalidGrid("give one of n or h".into())),
        },
        None => LogGrid::new(lo, hi, n),
    }
}

fn weight(a: f64) -> Result<TimeWeight<f64>> {
    if a == 0.0 {
        Ok(TimeWeight::One)
    } else {
        TimeWeight::power(a)
    }
}

fn coefficients(p: &ProblemConfig) -> Result<RoughCoefficients<f64>> {
    let mut out = RoughCoefficients::constant(p.a);
    if let Some(c) = &p.coefficients {
        out.variable = match c.variable {
            CoefficientVariable::Space => Variable::Space,
            CoefficientVariable::Time => Variable::Time,
        };
        let a = if let Some(t) = c.two_phase {
            PiecewiseConstant::two_phase(t.lo, t.hi, t.start, t.period, t.count)?
        } else if !c.values.is_empty() {
            PiecewiseConstant::new(c.breaks.clone(), c.values.clone())?
        } else {
            PiecewiseConstant::constant(p.a)
        };
        out.nu = c.nu.unwrap_or(a.min().min(a.max().recip()));
        out.a = a;
    }
    Ok(out)
}

fn elliptic_problem(p: &ProblemConfig) -> Result<EllipticProblem<f64>> {
    Ok(EllipticProblem::new(coefficients(p)?, p.ratios(), p.lambda, pieces(&p.big_f)?, pieces(&p.f)?))
}

fn parabolic_problem(p: &ProblemConfig) -> Result<ParabolicProblem<f64>> {
    let pb = ParabolicProblem::new(
        coefficients(p)?,
        p.ratios(),
        p.lambda,
        SpaceTimeData::stationary(pieces(&p.big_f)?),
        SpaceTimeData::stationary(pieces(&p.f)?),
    );
    Ok(if p.initial.is_empty() { pb } else { pb.with_initial(pieces(&p.initial)?) })
}

fn scheme(s: Scheme) -> TimeScheme {
    match s {
        Scheme::CrankNicolson => TimeScheme::CrankNicolson,
        Scheme::ImplicitEuler => TimeScheme::ImplicitEuler,
    }
}

fn nodal_rows(g: &LogGrid<f64>, u: &[f64]) -> Vec<Row> {
    u.iter().enumerate().map(|(j, v)| Row::new().with("node", j).with("s", g.s(j)).with("x", g.x(j)).with("u", *v)).collect()
}

fn estimate_row(r: &EstimateReport<f64>) -> Row {
    Row::new()
        .with("p", r.p)
        .with("theta", r.theta)
        .with("lambda", r.lambda)
        .with("lhs", r.lhs)
        .with("rhs", r.rhs)
        .with("ratio", r.ratio)
        .with("u_norm", r.u_norm)
        .with("xdu_norm", r.xdu_norm)
        .with("big_f_norm", r.big_f_norm)
        .with("f_norm", r.f_norm)
        .with("regime", regime_str(r.regime))
        .with("window_violation", r.window_violation)
        .with("solver", r.solver.as_str())
}

/// `u(x) = x e^{-x}` with its exact log derivative.
fn gamma_function(g: LogGrid<f64>) -> Result<SampledFunction<f64>> {
    SampledFunction::from_fn_with_derivative(g, |s: f64| (s - s.exp()).exp(), |s: f64| (1.0 - s.exp()) * (s - s.exp()).exp())
}

fn family(cfg: &ExperimentConfig, f: Family, count: usize, g: LogGrid<f64>) -> Result<Vec<SampledFunction<f64>>> {
    match f {
        Family::Gamma => Ok(vec![gamma_function(g)?]),
        Family::Bumps => random_bump_family(cfg.seed(), count).iter().map(|b| b.sample(g)).collect(),
    }
}

fn combos(members: usize, ps: &[f64], thetas: &[f64]) -> Vec<(usize, f64, f64)> {
    (0..members).flat_map(|i| ps.iter().flat_map(move |&p| thetas.iter().map(move |&t| (i, p, t)))).collect()
}

pub fn norms(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.norms;
    let g = grid(cfg, -6.0, 6.0, 1537)?;
    let funcs = family(cfg, c.family, c.count, g)?;
    let rows: Vec<Row> = combos(funcs.len(), &sorted(&c.p), &sorted(&c.theta))
        .par_iter()
        .map(|&(i, p, theta)| {
            let spec = NormSpec::new(p, theta)?;
            let u = &funcs[i];
            let lp = lp_theta_norm(u, &spec)?;
            let h1 = h1_theta_norm(u, &spec)?;
            let dy = dyadic_norm(u, &spec, &build_cutoff(p))?;
            Ok(Row::new()
                .with("member", i)
                .with("p", p)
                .with("theta", theta)
                .with("lp_norm", lp)
                .with("h1_norm", h1)
                .with("dyadic_norm", dy)
                .with("dyadic_over_h1", if h1 > 0.0 { dy / h1 } else { f64::NAN }))
        })
        .collect::<Result<_>>()?;
    Ok((rows, json!({ "members": funcs.len(), "grid": g.id() })))
}

pub fn hardy(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.hardy;
    let g = grid(cfg, -40.0, 4.5, 40001)?;
    let funcs = family(cfg, c.family, c.count, g)?;
    let rows: Vec<Row> = combos(funcs.len(), &sorted(&c.p), &sorted(&c.theta))
        .par_iter()
        .map(|&(i, p, theta)| {
            let r = hardy_check(&funcs[i], &NormSpec::new(p, theta)?)?;
            Ok(Row::new()
                .with("member", i)
                .with("p", p)
                .with("theta", theta)
                .with("lhs", r.lhs)
                .with("rhs", r.rhs)
                .with("holds", r.holds)
                .with("slack", r.slack))
        })
        .collect::<Result<_>>()?;
    let all = rows.iter().all(|r| r.get("holds") == Some(&true.into()));
    Ok((rows, json!({ "members": funcs.len(), "grid": g.id(), "all_hold": all })))
}

pub fn euler_exact(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (p, theta) = (cfg.exact.p, cfg.exact.theta);
    let g = grid(cfg, -8.0, 8.0, 513)?;
    let pb = cfg.problem.euler()?;
    let sol = euler_solve_exact(&pb, p, theta, &g)?;
    let (u, xdu) = (sol.u(), sol.xdu());
    let rows = nodal_rows(&g, u.values())
        .into_iter()
        .zip(xdu.values())
        .map(|(r, d)| r.with("xdu", *d))
        .collect();
    let roots = sol.roots();
    let window = admissible_theta(&roots, p)?;
    let (un, dn) = sol.norms()?;
    Ok((
        rows,
        json!({
            "grid": g.id(),
            "p": p,
            "theta": theta,
            "alpha": roots.alpha,
            "beta": roots.beta,
            "window": [window.lower, window.upper],
            "regime": sol.regime().as_str(),
            "u_norm": un,
            "xdu_norm": dn,
        }),
    ))
}

pub fn solve_elliptic(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (p, theta) = (cfg.elliptic.p, cfg.elliptic.theta);
    let g = grid(cfg, -20.0, 20.0, 1281)?;
    let pb = elliptic_problem(&cfg.problem)?;
    let rep = elliptic_solve_fd(&pb, &g, p, theta)?;
    Ok((
        nodal_rows(&g, rep.solution.values()),
        json!({
            "grid": g.id(),
            "coefficients": pb.coeffs.id(),
            "p": p,
            "theta": theta,
            "residual_norm": rep.residual_norm,
            "truncation_certificate": rep.truncation_certificate,
            "window_violation": rep.window_violation,
            "factorization": rep.factorization,
        }),
    ))
}

pub fn solve_parabolic(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (p, theta) = (cfg.parabolic.p, cfg.parabolic.theta);
    let g = grid(cfg, -12.0, 12.0, 385)?;
    let t = cfg.time;
    let tg = TimeGrid::new(t.t_end, t.steps)?;
    let pb = parabolic_problem(&cfg.problem)?;
    let opts = ParabolicOptions { scheme: scheme(t.scheme), rannacher_steps: t.rannacher, keep_history: false };
    let rep = parabolic_solve_fd(&pb, &g, &tg, p, theta, opts)?;
    Ok((
        nodal_rows(&g, rep.solution.values()),
        json!({
            "grid": g.id(),
            "coefficients": pb.coeffs.id(),
            "t_end": t.t_end,
            "steps": t.steps,
            "p": p,
            "theta": theta,
            "residual_norm": rep.residual_norm,
            "truncation_certificate": rep.truncation_certificate,
            "window_violation": rep.window_violation,
            "factorization": rep.factorization,
        }),
    ))
}

pub fn bs_price(cfg: &ExperimentConfig) -> Result<Outcome> {
    let b = &cfg.bs;
    let payoff = match b.payoff {
        PayoffKind::Call => Payoff::Call(b.strike),
        PayoffKind::Put => Payoff::Put(b.strike),
        PayoffKind::Indicator => Payoff::Indicator(b.lo, b.hi),
        PayoffKind::Constant => Payoff::Constant(b.value),
        PayoffKind::Identity => Payoff::Identity,
    };
    let params = BSParams::new(b.sigma, b.r, b.horizon, payoff.clone())?;
    let rows: Vec<Row> = sorted(&b.spots)
        .par_iter()
        .map(|&x| {
            let quad = bs_solve(&params, x)?;
            let mut row = Row::new().with("spot", x).with("price_quadrature", quad);
            if b.fd {
                let s = x.ln();
                let h = payoff.clone();
                let profile = Profile::smooth_s(move |s: f64| h.eval(s.exp()), s - b.fd_half_width - 1.0, s + b.fd_half_width + 1.0);
                let pb = ParabolicProblem::black_scholes(b.sigma, b.r, profile);
                let g = LogGrid::new(s - b.fd_half_width, s + b.fd_half_width, b.fd_nodes)?;
                let tg = TimeGrid::new(b.horizon, b.fd_steps)?;
                let opts = ParabolicOptions { scheme: TimeScheme::CrankNicolson, rannacher_steps: 2, keep_history: false };
                let fd = parabolic_solve_fd(&pb, &g, &tg, 2.0, -1.0, opts)?.solution.eval_s(s);
                let rel = if quad != 0.0 { (fd - quad).abs() / quad.abs() } else { (fd - quad).abs() };
                row = row.with("price_fd", fd).with("rel_diff", rel);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok((rows, json!({ "sigma": b.sigma, "r": b.r, "horizon": b.horizon, "fd": b.fd })))
}

pub fn theta_sweep_run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.theta_sweep;
    let g = grid(cfg, -8.0, 8.0, 1477)?;
    let pb = cfg.problem.euler()?;
    let solver = match c.solver {
        Solver::Exact => SolverKind::Exact,
        Solver::Fd => SolverKind::Fd,
    };
    let mut rows = Vec::new();
    let mut per_p = Vec::new();
    for p in sorted(&c.p) {
        let sweep = theta_sweep(&pb, p, &g, solver)?;
        for r in &sweep.rows {
            rows.push(estimate_row(r).with("kind", "ratio").with("blowup", sweep.spurious.contains(&r.theta)));
        }
        for e in &sweep.endpoints {
            let near = e.ratios.last().map_or(f64::NAN, |r| r.1);
            rows.push(
                Row::new()
                    .with("p", p)
                    .with("theta", e.endpoint)
                    .with("ratio", near)
                    .with("kind", "endpoint")
                    .with("growth", e.growth)
                    .with("blowup", e.flagged),
            );
        }
        per_p.push(json!({
            "p": p,
            "reference_ratio": sweep.reference_ratio,
            "blowup_flags": sweep.blowup_flags,
            "spurious": sweep.spurious,
        }));
    }
    Ok((rows, json!({ "grid": g.id(), "solver": solver.as_str(), "sweeps": per_p })))
}

pub fn lambda_sweep_run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.lambda_sweep;
    let g = grid(cfg, -20.0, 20.0, 1849)?;
    let pb = elliptic_problem(&cfg.problem)?;
    let sweep = lambda_sweep(&pb, c.p, c.theta, &sorted(&c.lambdas), &g)?;
    let rows = sweep.rows.iter().map(estimate_row).collect();
    Ok((
        rows,
        json!({
            "grid": g.id(),
            "lambda_star": sweep.lambda_star,
            "refinement_change": sweep.refinement_change,
            "lambda_zero_flagged": sweep.lambda_zero_flagged,
        }),
    ))
}

pub fn ink_spots(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.ink;
    let gammas = sorted(&c.gamma);
    let sets: Vec<(IntervalSet<f64>, IntervalSet<f64>)> = if c.random_sets > 0 {
        let g_min = gammas.first().copied().unwrap_or(0.5);
        (0..c.random_sets as u64)
            .map(|i| {
                let e = random_interval_set(cfg.seed().wrapping_add(i), 6, -5.0, 5.0, 0.05, 1.0);
                let (lo, hi) = e.hull().unwrap_or((0.0, 1.0));
                let pad = e.measure() / g_min;
                Ok((e, IntervalSet::single(lo - pad, hi + pad)?))
            })
            .collect::<Result<_>>()?
    } else {
        let pairs = |v: &[[f64; 2]]| v.iter().map(|[a, b]| (*a, *b)).collect::<Vec<_>>();
        vec![(IntervalSet::new(pairs(&c.e))?, IntervalSet::new(pairs(&c.f))?)]
    };
    let k = InkConstants::for_weight(weight(c.weight_exponent)?, c.p)?;
    let clip = c.clip.unwrap_or(f64::INFINITY);
    let jobs: Vec<(usize, f64)> = (0..sets.len()).flat_map(|i| gammas.iter().map(move |&g| (i, g))).collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(i, gamma)| {
            let (e, f) = &sets[i];
            let r = evaluate_lemma(e, f, gamma, clip, &k)?;
            let cover = select_cover(e, gamma)?;
            Ok(Row::new()
                .with("set", i)
                .with("gamma", gamma)
                .with("e_measure", e.measure())
                .with("f_measure", f.measure())
                .with("hypothesis", r.hypothesis_holds)
                .with("witness_t", r.counterexample.map(|w| w.0))
                .with("witness_r", r.counterexample.map(|w| w.1))
                .with("w_e", r.w_e)
                .with("w_f", r.w_f)
                .with("bound_rhs", r.bound_rhs)
                .with("conclusion", r.conclusion_holds)
                .with("cover_size", cover.cylinders.len())
                .with("cover_residual", cover.residual))
        })
        .collect::<Result<_>>()?;
    Ok((rows, json!({ "ap": k.ap, "n": k.n, "delta": k.delta, "p": c.p, "weight_exponent": c.weight_exponent })))
}

pub fn ap_weight(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.ap;
    let mut res = c.resolutions.clone();
    res.sort_unstable();
    res.dedup();
    let pairs: Vec<(f64, f64)> = sorted(&c.exponents).into_iter().flat_map(|a| sorted(&c.p).into_iter().map(move |p| (a, p))).collect();
    let groups: Vec<Vec<Row>> = pairs
        .par_iter()
        .map(|&(a, p)| {
            let w = weight(a)?;
            let mut rows = res
                .iter()
                .map(|&n| {
                    Ok(Row::new()
                        .with("exponent", a)
                        .with("p", p)
                        .with("kind", "estimate")
                        .with("resolution", n)
                        .with("ap_estimate", ap_constant_estimate(&w, p, n)?))
                })
                .collect::<Result<Vec<_>>>()?;
            if c.doubling {
                let row = Row::new().with("exponent", a).with("p", p).with("kind", "doubling");
                rows.push(match doubling_check(&w, p)? {
                    DoublingOutcome::Holds { ap } => row.with("outcome", "holds").with("ap_estimate", ap),
                    DoublingOutcome::Violated { t, radius } => {
                        row.with("outcome", "violated").with("t", t).with("radius", radius)
                    }
                    DoublingOutcome::NotApplicable { ap_coarse, ap_fine } => {
                        row.with("outcome", "not-applicable").with("ap_coarse", ap_coarse).with("ap_fine", ap_fine)
                    }
                });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok((groups.into_iter().flatten().collect(), json!({ "pairs": pairs.len() })))
}

fn study_rows(s: &ConvergenceStudy<f64>) -> Vec<Row> {
    s.levels
        .iter()
        .enumerate()
        .map(|(k, l)| Row::new().with("level", k).with("h", l.h).with("error", l.error).with("order", l.order))
        .collect()
}

pub fn convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = cfg.convergence;
    let study = match c.study {
        Study::Oracle => exact_oracle_study(&cfg.problem.euler()?, c.p, c.theta, &grid(cfg, -40.0, 40.0, 1849)?, c.levels)?,
        Study::Manufactured => {
            let pb = &cfg.problem;
            let g = grid(cfg, -8.0, 8.0, 129)?;
            manufactured_study(&ClosedForm::gaussian(c.width), &coefficients(pb)?, &pb.ratios(), pb.lambda, c.p, c.theta, &g, c.levels)?
        }
        Study::Temporal => {
            let t = cfg.time;
            let g = grid(cfg, -8.0, 8.0, 257)?;
            temporal_study(&parabolic_problem(&cfg.problem)?, &g, t.t_end, t.steps, c.levels, scheme(t.scheme), c.p, c.theta)?
        }
    };
    Ok((
        study_rows(&study),
        json!({
            "final_order": study.final_order,
            "min_order": study.min_order(),
            "non_convergence": study.non_convergence,
        }),
    ))
}
