use std::fmt;
use std::sync::Arc;

use super::coefficients::{RoughCoefficients, Variable};
use super::elliptic::{assemble_operator, hull, relative_residual, truncation, weak_load};
use crate::error::{LabError, Result};
use crate::exact1d::LowerOrderRatios;
use crate::grid::{LogGrid, TimeGrid};
use crate::profile::Profile;
use crate::scalar::{c, Real};
use crate::tridiag::Tridiagonal;
use crate::weighted::{Interp, SampledFunction};

pub type TimeFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Space-time data `Σ_k g_k(t) P_k(s)`.
#[derive(Clone, Default)]
pub struct SpaceTimeData<T> {
    terms: Vec<(TimeFn<T>, Profile<T>)>,
}

impl<T: fmt::Debug> fmt::Debug for SpaceTimeData<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.terms.iter().map(|(_, p)| p)).finish()
    }
}

impl<T: Real> SpaceTimeData<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Constant in time.
    pub fn stationary(profile: Profile<T>) -> Self {
        Self::separable(Arc::new(|_| T::one()), profile)
    }

    pub fn separable(g: TimeFn<T>, profile: Profile<T>) -> Self {
        Self { terms: vec![(g, profile)] }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn terms(&self) -> &[(TimeFn<T>, Profile<T>)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_zero())
    }

    /// The profile at time `t`.
    pub fn at(&self, t: T) -> Profile<T> {
        self.terms.iter().fold(Profile::zero(), |acc, (g, p)| acc.plus(&p.scaled(g(t))))
    }

    pub fn support(&self) -> Option<(T, T)> {
        self.terms.iter().fold(None, |acc, (_, p)| hull(acc, p.support()))
    }
}

/// `a₀ u_t - x²D(aDu) + x b Du + x D(b̂u) + c u + λ c₀ u = DF + f` on
/// `(0, T)` with `u(0) = u₀` (zero when absent).
#[derive(Debug, Clone)]
pub struct ParabolicProblem<T> {
    pub coeffs: RoughCoefficients<T>,
    pub ratios: LowerOrderRatios<T>,
    pub lambda: T,
    pub big_f: SpaceTimeData<T>,
    pub f: SpaceTimeData<T>,
    pub initial: Option<Profile<T>>,
}

impl<T: Real> ParabolicProblem<T> {
    pub fn new(coeffs: RoughCoefficients<T>, ratios: LowerOrderRatios<T>, lambda: T, big_f: SpaceTimeData<T>, f: SpaceTimeData<T>) -> Self {
        Self { coeffs, ratios, lambda, big_f, f, initial: None }
    }

    pub fn with_initial(self, u0: Profile<T>) -> Self {
        Self { initial: Some(u0), ..self }
    }

    /// Reversed-time Black–Scholes problem for volatility `sigma` and rate
    /// `r`: `a = σ²/2`, `n_b = -r/a`, `n_c = r/a`, initial data the payoff.
    pub fn black_scholes(sigma: T, r: T, payoff: Profile<T>) -> Self {
        let a = sigma * sigma * c(0.5);
        Self::new(RoughCoefficients::constant(a), LowerOrderRatios::new(-r / a, T::zero(), r / a), T::zero(), SpaceTimeData::zero(), SpaceTimeData::zero())
            .with_initial(payoff)
    }

    pub fn validate(&self) -> Result<()> {
        self.coeffs.validate()?;
        self.ratios.validate()?;
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(LabError::InvalidCoefficients(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn data_support(&self) -> Option<(T, T)> {
        hull(self.big_f.support(), self.f.support())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeScheme {
    ImplicitEuler,
    CrankNicolson,
}

impl TimeScheme {
    fn weight<T: Real>(self) -> T {
        match self {
            Self::ImplicitEuler => T::one(),
            Self::CrankNicolson => c(0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicOptions {
    pub scheme: TimeScheme,
    /// Leading steps replaced by two implicit Euler half steps each.
    pub rannacher_steps: usize,
    /// Keep every time level in the report.
    pub keep_history: bool,
}

impl Default for ParabolicOptions {
    fn default() -> Self {
        Self { scheme: TimeScheme::ImplicitEuler, rannacher_steps: 0, keep_history: false }
    }
}

#[derive(Debug, Clone)]
pub struct ParabolicReport<T> {
    /// Solution at `t = T`.
    pub solution: SampledFunction<T>,
    /// Levels `0..=m` when requested.
    pub history: Option<Vec<SampledFunction<T>>>,
    pub time_grid: TimeGrid<T>,
    /// Largest relative step residual.
    pub residual_norm: T,
    pub factorization: &'static str,
    pub truncation_certificate: T,
    pub window_violation: bool,
}

struct Stepper<'a, T> {
    problem: &'a ParabolicProblem<T>,
    grid: &'a LogGrid<T>,
    loads_big_f: Vec<Vec<T>>,
    loads_f: Vec<Vec<T>>,
    /// Operator and mass for time-independent coefficients.
    frozen: Option<(Tridiagonal<T>, Vec<T>)>,
    residual: T,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn new(problem: &'a ParabolicProblem<T>, grid: &'a LogGrid<T>) -> Self {
        let z = Profile::zero();
        let loads_big_f = problem.big_f.terms().iter().map(|(_, p)| weak_load(grid, p, &z)).collect();
        let loads_f = problem.f.terms().iter().map(|(_, p)| weak_load(grid, &z, p)).collect();
        let time_const = problem.coeffs.variable == Variable::Space
            || (problem.coeffs.a.is_constant() && problem.coeffs.a0.is_constant() && problem.coeffs.c0.is_constant());
        let mut s = Self { problem, grid, loads_big_f, loads_f, frozen: None, residual: T::zero() };
        if time_const {
            s.frozen = Some(s.assemble(T::zero()));
        }
        s
    }

    /// Operator and mass diagonal at time `t`. Time-dependent `a₀` is
    /// divided out of the operator instead of entering the mass.
    fn assemble(&self, t: T) -> (Tridiagonal<T>, Vec<T>) {
        let pb = self.problem;
        let (a0, a, c0) = pb.coeffs.frozen(t);
        let mut op = assemble_operator(self.grid, &a, &c0, &pb.ratios, pb.lambda);
        let n = self.grid.len();
        let half = self.grid.h() * c(0.5);
        let mass = match pb.coeffs.variable {
            Variable::Space => (1..n - 1).map(|j| a0.mean(self.grid.s(j) - half, self.grid.s(j) + half)).collect(),
            Variable::Time => {
                let k = a0.eval(t).recip();
                for v in op.lower.iter_mut().chain(op.diag.iter_mut()).chain(op.upper.iter_mut()) {
                    *v *= k;
                }
                vec![T::one(); n - 2]
            }
        };
        (op, mass)
    }

    fn load(&self, t: T) -> Vec<T> {
        let mut b = vec![T::zero(); self.grid.len() - 2];
        let terms = self.problem.big_f.terms().iter().zip(&self.loads_big_f).chain(self.problem.f.terms().iter().zip(&self.loads_f));
        for ((g, _), l) in terms {
            let k = g(t);
            if k != T::zero() {
                for (bi, li) in b.iter_mut().zip(l) {
                    *bi += k * *li;
                }
            }
        }
        b
    }

    /// One θ-step from `t` to `t + dt` on interior values.
    fn step(&mut self, v: &[T], t: T, dt: T, w: T) -> Result<Vec<T>> {
        let mid = t + dt * c(0.5);
        let (op, mass) = match &self.frozen {
            Some(m) => m.clone(),
            None => self.assemble(mid),
        };
        let n = v.len();
        let mut lhs = op.clone();
        for (i, m) in mass.iter().enumerate().take(n) {
            lhs.lower[i] *= w;
            lhs.upper[i] *= w;
            lhs.diag[i] = lhs.diag[i] * w + *m / dt;
        }
        let lv = op.apply(v);
        let (mut b1, mut b0) = (self.load(t + dt), self.load(t));
        if self.problem.coeffs.variable == Variable::Time {
            let k = self.problem.coeffs.a0.eval(mid).recip();
            b1.iter_mut().chain(b0.iter_mut()).for_each(|v| *v *= k);
        }
        let rhs: Vec<T> = (0..n)
            .map(|i| mass[i] / dt * v[i] - (T::one() - w) * lv[i] + w * b1[i] + (T::one() - w) * b0[i])
            .collect();
        let x = lhs.solve(&rhs).map_err(|_| LabError::SingularOperator {
            theta: f64::NAN,
            lambda: self.problem.lambda.to_f64_lossy(),
        })?;
        self.residual = self.residual.max(relative_residual(&lhs, &x, &rhs));
        Ok(x)
    }
}

fn with_ends<T: Real>(grid: &LogGrid<T>, interior: &[T]) -> Result<SampledFunction<T>> {
    let mut values = Vec::with_capacity(interior.len() + 2);
    values.push(T::zero());
    values.extend_from_slice(interior);
    values.push(T::zero());
    SampledFunction::new(*grid, values, Interp::Linear)
}

/// θ-scheme in time with the spatial discretization of
/// [`super::elliptic_solve_fd`] and zero Dirichlet values at the ends.
///
/// Coefficients depending on `t` are sampled at step midpoints.
pub fn parabolic_solve_fd<T: Real>(
    problem: &ParabolicProblem<T>,
    grid: &LogGrid<T>,
    tg: &TimeGrid<T>,
    p: T,
    theta: T,
    options: ParabolicOptions,
) -> Result<ParabolicReport<T>> {
    problem.validate()?;
    grid.require_solver_size()?;
    if !(tg.dt() > T::zero()) {
        return Err(LabError::InvalidGrid(format!("time step must be positive, got {}", tg.dt())));
    }
    let (certificate, window_violation) = truncation(
        &problem.ratios,
        &problem.coeffs,
        problem.lambda,
        problem.data_support(),
        grid,
        p,
        theta,
    )?;
    let n = grid.len();
    let mut v: Vec<T> = match &problem.initial {
        Some(u0) => (1..n - 1).map(|j| u0.eval(grid.s(j))).collect(),
        None => vec![T::zero(); n - 2],
    };
    let mut stepper = Stepper::new(problem, grid);
    let mut history = options.keep_history.then(Vec::new);
    if let Some(h) = history.as_mut() {
        h.push(with_ends(grid, &v)?);
    }
    let dt = tg.dt();
    let w = options.scheme.weight::<T>();
    for k in 0..tg.steps() {
        let t = tg.t(k);
        v = if k < options.rannacher_steps {
            let half = dt * c(0.5);
            let v1 = stepper.step(&v, t, half, T::one())?;
            stepper.step(&v1, t + half, half, T::one())?
        } else {
            stepper.step(&v, t, dt, w)?
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(LabError::SingularOperator { theta: theta.to_f64_lossy(), lambda: problem.lambda.to_f64_lossy() });
        }
        if let Some(h) = history.as_mut() {
            h.push(with_ends(grid, &v)?);
        }
    }
    Ok(ParabolicReport {
        solution: with_ends(grid, &v)?,
        history,
        time_grid: *tg,
        residual_norm: stepper.residual,
        factorization: "thomas",
        truncation_certificate: certificate,
        window_violation,
    })
}
