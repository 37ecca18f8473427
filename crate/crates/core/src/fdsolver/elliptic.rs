use super::coefficients::{PiecewiseConstant, RoughCoefficients, Variable};
use super::SolveReport;
use crate::error::{LabError, Result};
use crate::exact1d::{admissible_theta, indicial_roots, EulerProblem, LowerOrderRatios};
use crate::grid::LogGrid;
use crate::profile::Profile;
use crate::scalar::{c, Real};
use crate::tridiag::Tridiagonal;
use crate::weighted::{Interp, SampledFunction};

/// `-x²D(aDu) + x b Du + x D(b̂u) + c u + λ c₀ u = DF + f` with
/// `b = n_b a`, `b̂ = n_b̂ a`, `c = n_c a`.
#[derive(Debug, Clone)]
pub struct EllipticProblem<T> {
    pub coeffs: RoughCoefficients<T>,
    pub ratios: LowerOrderRatios<T>,
    pub lambda: T,
    pub big_f: Profile<T>,
    pub f: Profile<T>,
}

impl<T: Real> EllipticProblem<T> {
    pub fn new(coeffs: RoughCoefficients<T>, ratios: LowerOrderRatios<T>, lambda: T, big_f: Profile<T>, f: Profile<T>) -> Self {
        Self { coeffs, ratios, lambda, big_f, f }
    }

    /// Constant-coefficient problem with `a₀ = c₀ = 1`.
    pub fn from_euler(pb: &EulerProblem<T>) -> Self {
        Self::new(RoughCoefficients::constant(pb.a), pb.ratios, pb.lambda, pb.big_f.clone(), pb.f.clone())
    }

    pub fn validate(&self) -> Result<()> {
        self.coeffs.validate()?;
        self.ratios.validate()?;
        if self.coeffs.variable == Variable::Time
            && !(self.coeffs.a.is_constant() && self.coeffs.c0.is_constant())
        {
            return Err(LabError::InvalidCoefficients(
                "elliptic problems need coefficients depending on x".into(),
            ));
        }
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(LabError::InvalidCoefficients(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn data_support(&self) -> Option<(T, T)> {
        hull(self.big_f.support(), self.f.support())
    }
}

pub(crate) fn hull<T: Real>(a: Option<(T, T)>, b: Option<(T, T)>) -> Option<(T, T)> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x),
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
    }
}

/// Interior rows `1..n-1` of the discrete operator
/// `-(ã v')' + (1 + n_b) ã v' + n_b̂ (ã v)' + (n_c ã + λ c̃₀) v`.
///
/// Fluxes use harmonic means of `ã` over cells; the first-order terms
/// average the two face fluxes; zeroth-order terms use means over the
/// dual cell `[s_j - h/2, s_j + h/2]`.
pub fn assemble_operator<T: Real>(
    grid: &LogGrid<T>,
    a: &PiecewiseConstant<T>,
    c0: &PiecewiseConstant<T>,
    ratios: &LowerOrderRatios<T>,
    lambda: T,
) -> Tridiagonal<T> {
    let n = grid.len();
    let h = grid.h();
    let half = h * c(0.5);
    let faces: Vec<T> = (0..n - 1).map(|j| a.harmonic_mean(grid.s(j), grid.s(j + 1))).collect();
    let adv = T::one() + ratios.n_b;
    let mut m = Tridiagonal::zeros(n - 2);
    for j in 1..n - 1 {
        let (am, ap) = (faces[j - 1], faces[j]);
        let s = grid.s(j);
        let mass = ratios.n_c * a.mean(s - half, s + half) + lambda * c0.mean(s - half, s + half);
        let i = j - 1;
        m.lower[i] = -am / (h * h) - (adv + ratios.n_bhat) * am / (h + h);
        m.upper[i] = -ap / (h * h) + (adv + ratios.n_bhat) * ap / (h + h);
        m.diag[i] = (ap + am) / (h * h) + (adv * (am - ap) + ratios.n_bhat * (ap - am)) / (h + h) + mass;
    }
    m
}

/// Interior load `(1/h)[-∫ F̃ e^{-s}(φ_j' - φ_j) + ∫ f̃ φ_j]` against the
/// hat functions `φ_j`.
pub fn weak_load<T: Real>(grid: &LogGrid<T>, big_f: &Profile<T>, f: &Profile<T>) -> Vec<T> {
    let n = grid.len();
    let h = grid.h();
    let mut out = vec![T::zero(); n - 2];
    let touches = |supp: Option<(T, T)>, lo: T, hi: T| supp.is_some_and(|(a, b)| hi > a && lo < b);
    let (sf, sbf) = (f.support(), big_f.support());
    let (bps_f, bps_bf) = (f.breakpoints(), big_f.breakpoints());
    for j in 1..n - 1 {
        let (sl, s0, sr) = (grid.s(j - 1), grid.s(j), grid.s(j + 1));
        let up = |s: T| (s - sl) / h;
        let down = |s: T| (sr - s) / h;
        let mut v = T::zero();
        if touches(sf, sl, sr) {
            v += f.integrate_weighted(sl, s0, &bps_f, h, up) + f.integrate_weighted(s0, sr, &bps_f, h, down);
        }
        if touches(sbf, sl, sr) {
            let hr = h.recip();
            v -= big_f.integrate_weighted(sl, s0, &bps_bf, h, |s| (-s).exp() * (hr - up(s)));
            v -= big_f.integrate_weighted(s0, sr, &bps_bf, h, |s| (-s).exp() * (-hr - down(s)));
        }
        out[j - 1] = v / h;
    }
    out
}

/// `max |A x - b| / max |b|` (absolute when `b = 0`).
pub(crate) fn relative_residual<T: Real>(m: &Tridiagonal<T>, x: &[T], b: &[T]) -> T {
    let ax = m.apply(x);
    let r = ax.iter().zip(b).fold(T::zero(), |acc, (u, v)| acc.max((*u - *v).abs()));
    let scale = b.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if scale > T::zero() {
        r / scale
    } else {
        r
    }
}

/// `(certificate, window_violation)` for a problem whose data sit in
/// `support` on `grid`.
///
/// The certificate is `exp(-min(|α - θ/p|, |β - θ/p|) · margin)` with
/// roots of the operator including `λ c₀ / a` at its weakest, and margin
/// the distance from the data to the nearer grid end.
pub(crate) fn truncation<T: Real>(
    ratios: &LowerOrderRatios<T>,
    coeffs: &RoughCoefficients<T>,
    lambda: T,
    support: Option<(T, T)>,
    grid: &LogGrid<T>,
    p: T,
    theta: T,
) -> Result<(T, bool)> {
    let window_violation = if lambda == T::zero() {
        match indicial_roots(ratios) {
            Ok(r) => !admissible_theta(&r, p)?.contains(theta),
            Err(_) => true,
        }
    } else {
        false
    };
    let Some((lo, hi)) = support else {
        return Ok((T::zero(), window_violation));
    };
    let margin = (lo - grid.s_min()).min(grid.s_max() - hi);
    if !(margin > T::zero()) {
        return Err(LabError::TruncationError(format!(
            "data on [{lo}, {hi}] not strictly inside grid [{}, {}]",
            grid.s_min(),
            grid.s_max()
        )));
    }
    let eff = LowerOrderRatios { n_c: ratios.n_c + lambda * coeffs.c0.min() / coeffs.a.max(), ..*ratios };
    let (al, be) = match indicial_roots(&eff) {
        Ok(r) => (r.alpha, r.beta),
        Err(_) => {
            let z = -eff.linear_coefficient() * c(0.5);
            (z, z)
        }
    };
    let rate = (al - theta / p).abs().min((be - theta / p).abs());
    Ok(((-rate * margin).exp(), window_violation))
}

/// Finite-difference solution in `s = log x` with zero Dirichlet values at
/// the grid ends.
///
/// `p`, `θ` only tag the report: the window flag and the truncation
/// certificate depend on them.
///
/// Errors: [`LabError::TruncationError`] if the data reach the grid ends,
/// [`LabError::SingularOperator`] on pivot breakdown, and
/// [`LabError::InvalidGrid`] below 16 nodes.
pub fn elliptic_solve_fd<T: Real>(problem: &EllipticProblem<T>, grid: &LogGrid<T>, p: T, theta: T) -> Result<SolveReport<T>> {
    problem.validate()?;
    grid.require_solver_size()?;
    let (certificate, window_violation) = truncation(
        &problem.ratios,
        &problem.coeffs,
        problem.lambda,
        problem.data_support(),
        grid,
        p,
        theta,
    )?;
    let (_, a, c0) = problem.coeffs.frozen(T::zero());
    let m = assemble_operator(grid, &a, &c0, &problem.ratios, problem.lambda);
    let b = weak_load(grid, &problem.big_f, &problem.f);
    let x = m.solve(&b).map_err(|_| LabError::SingularOperator {
        theta: theta.to_f64_lossy(),
        lambda: problem.lambda.to_f64_lossy(),
    })?;
    let residual_norm = relative_residual(&m, &x, &b);
    let mut values = Vec::with_capacity(grid.len());
    values.push(T::zero());
    values.extend(x);
    values.push(T::zero());
    let solution = SampledFunction::new(*grid, values, Interp::Linear).map_err(|_| LabError::SingularOperator {
        theta: theta.to_f64_lossy(),
        lambda: problem.lambda.to_f64_lossy(),
    })?;
    Ok(SolveReport {
        solution,
        residual_norm,
        factorization: "thomas",
        truncation_certificate: certificate,
        window_violation,
    })
}
