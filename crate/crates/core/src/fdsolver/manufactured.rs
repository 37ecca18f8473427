use std::fmt;
use std::sync::Arc;

use super::coefficients::{PiecewiseConstant, RoughCoefficients, Variable};
use super::parabolic::{SpaceTimeData, TimeFn};
use crate::error::{LabError, Result};
use crate::exact1d::LowerOrderRatios;
use crate::grid::LogGrid;
use crate::profile::{Profile, SmoothFn};
use crate::scalar::{c, Real};
use crate::weighted::{Interp, SampledFunction};

/// Function of `s = log x` with its first two derivatives, vanishing
/// outside `[lo, hi]`.
#[derive(Clone)]
pub struct ClosedForm<T> {
    v: SmoothFn<T>,
    dv: SmoothFn<T>,
    d2v: SmoothFn<T>,
    lo: T,
    hi: T,
}

impl<T: fmt::Debug> fmt::Debug for ClosedForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForm").field("lo", &self.lo).field("hi", &self.hi).finish()
    }
}

impl<T: Real> ClosedForm<T> {
    pub fn new(v: SmoothFn<T>, dv: SmoothFn<T>, d2v: SmoothFn<T>, lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(LabError::SupportError(format!("closed form needs a finite support, got [{lo}, {hi}]")));
        }
        Ok(Self { v, dv, d2v, lo, hi })
    }

    pub fn zero() -> Self {
        let z: SmoothFn<T> = Arc::new(|_| T::zero());
        Self { v: z.clone(), dv: z.clone(), d2v: z, lo: -T::one(), hi: T::one() }
    }

    /// `e^{-s²}` cut off at `|s| = width`.
    pub fn gaussian(width: T) -> Self {
        Self {
            v: Arc::new(|s: T| (-s * s).exp()),
            dv: Arc::new(|s: T| c::<T>(-2.0) * s * (-s * s).exp()),
            d2v: Arc::new(|s: T| (c::<T>(4.0) * s * s - c(2.0)) * (-s * s).exp()),
            lo: -width,
            hi: width,
        }
    }

    /// `exp(-1/(1 - t²))` with `t = (s - center)/w`.
    pub fn bump(center: T, w: T) -> Self {
        let q = move |s: T| {
            let t = (s - center) / w;
            (t, T::one() - t * t)
        };
        Self {
            v: Arc::new(move |s| {
                let (_, q) = q(s);
                if q > T::zero() { (-q.recip()).exp() } else { T::zero() }
            }),
            dv: Arc::new(move |s| {
                let (t, q) = q(s);
                if q > T::zero() { (-q.recip()).exp() * c::<T>(-2.0) * t / (q * q) / w } else { T::zero() }
            }),
            d2v: Arc::new(move |s| {
                let (t, q) = q(s);
                if q > T::zero() {
                    // d/dt [-2t/q²] = -2/q² - 8t²/q³
                    let g = c::<T>(-2.0) * t / (q * q);
                    let dg = c::<T>(-2.0) / (q * q) - c::<T>(8.0) * t * t / (q * q * q);
                    (-q.recip()).exp() * (g * g + dg) / (w * w)
                } else {
                    T::zero()
                }
            }),
            lo: center - w,
            hi: center + w,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        Self {
            v: Arc::new(move |s| a.eval(s) + b.eval(s)),
            dv: Arc::new(move |s| a1.derivative(s) + b1.derivative(s)),
            d2v: Arc::new(move |s| a2.second_derivative(s) + b2.second_derivative(s)),
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    fn inside(&self, s: T) -> bool {
        s > self.lo && s < self.hi
    }

    pub fn eval(&self, s: T) -> T {
        if self.inside(s) { (self.v)(s) } else { T::zero() }
    }

    pub fn derivative(&self, s: T) -> T {
        if self.inside(s) { (self.dv)(s) } else { T::zero() }
    }

    pub fn second_derivative(&self, s: T) -> T {
        if self.inside(s) { (self.d2v)(s) } else { T::zero() }
    }

    pub fn support(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    /// Node samples with exact derivatives.
    pub fn sample(&self, grid: LogGrid<T>) -> Result<SampledFunction<T>> {
        SampledFunction::from_fn_with_derivative(grid, |s| self.eval(s), |s| self.derivative(s))
    }
}

fn space_fields<T: Real>(coeffs: &RoughCoefficients<T>) -> Result<(PiecewiseConstant<T>, PiecewiseConstant<T>, PiecewiseConstant<T>)> {
    if coeffs.variable == Variable::Time
        && !(coeffs.a.is_constant() && coeffs.a0.is_constant() && coeffs.c0.is_constant())
    {
        return Err(LabError::InvalidCoefficients("manufactured data need coefficients depending on x".into()));
    }
    Ok(coeffs.frozen(T::zero()))
}

/// Sum over the pieces where `a` and `c₀` are both constant of
/// `g(a, c₀, s)` restricted to the piece.
fn piecewise_profile<T: Real>(
    a: &PiecewiseConstant<T>,
    c0: &PiecewiseConstant<T>,
    lo: T,
    hi: T,
    g: impl Fn(T, T, T) -> T + Clone + Send + Sync + 'static,
) -> Profile<T> {
    let mut cuts: Vec<T> = a.breaks().iter().chain(c0.breaks()).copied().filter(|b| *b > lo && *b < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut out = Profile::zero();
    for w in cuts.windows(2) {
        let mid = (w[0] + w[1]) * c(0.5);
        let (av, cv) = (a.eval(mid), c0.eval(mid));
        let g = g.clone();
        out = out.plus(&Profile::smooth_s(move |s| g(av, cv, s), w[0], w[1]));
    }
    out
}

/// Data `(F, f)` for which `u` solves the elliptic equation.
///
/// For coefficients constant in `x` this is `F = 0` and
/// `f = -a v'' + a(1 + n_b + n_b̂) v' + (a n_c + λ c₀) v`. With rough `a`
/// the second-order part is put in divergence form:
/// `F̃ = e^{s}(-ã v' + n_b̂ ã v)` and
/// `f̃ = (2 + n_b) ã v' + (n_c - n_b̂) ã v + λ c̃₀ v`.
pub fn manufactured_problem<T: Real>(
    u: &ClosedForm<T>,
    coeffs: &RoughCoefficients<T>,
    ratios: &LowerOrderRatios<T>,
    lambda: T,
) -> Result<(Profile<T>, Profile<T>)> {
    let (_, a, c0) = space_fields(coeffs)?;
    let (lo, hi) = u.support();
    let r = *ratios;
    if a.is_constant() && c0.is_constant() {
        let (av, cv) = (a.values()[0], c0.values()[0]);
        let w = u.clone();
        let f = Profile::smooth_s(
            move |s| {
                -av * w.second_derivative(s)
                    + av * r.linear_coefficient() * w.derivative(s)
                    + (av * r.n_c + lambda * cv) * w.eval(s)
            },
            lo,
            hi,
        );
        return Ok((Profile::zero(), f));
    }
    let w = u.clone();
    let big_f = piecewise_profile(&a, &c0, lo, hi, move |av, _, s| {
        s.exp() * (-av * w.derivative(s) + r.n_bhat * av * w.eval(s))
    });
    let w = u.clone();
    let f = piecewise_profile(&a, &c0, lo, hi, move |av, cv, s| {
        (c::<T>(2.0) + r.n_b) * av * w.derivative(s) + (r.n_c - r.n_bhat) * av * w.eval(s) + lambda * cv * w.eval(s)
    });
    Ok((big_f, f))
}

/// As [`manufactured_problem`] for node samples and coefficients constant
/// in `x`, with fourth-order differences. The samples must vanish on the
/// two outermost nodes at each end.
pub fn manufactured_from_samples<T: Real>(
    u: &SampledFunction<T>,
    coeffs: &RoughCoefficients<T>,
    ratios: &LowerOrderRatios<T>,
    lambda: T,
) -> Result<(Profile<T>, Profile<T>)> {
    let (_, a, c0) = space_fields(coeffs)?;
    if !(a.is_constant() && c0.is_constant()) {
        return Err(LabError::InvalidCoefficients("sampled manufactured data need constant coefficients".into()));
    }
    if u.interp() != Interp::Linear {
        return Err(LabError::InvalidFunction("sampled manufactured data need node values".into()));
    }
    let v = u.values();
    let n = v.len();
    if n < 5 || [v[0], v[1], v[n - 2], v[n - 1]].iter().any(|x| *x != T::zero()) {
        return Err(LabError::SupportError("samples must vanish on the two outer nodes at each end".into()));
    }
    let h = u.grid().h();
    let (av, cv) = (a.values()[0], c0.values()[0]);
    let twelve = c::<T>(12.0);
    let mut f = vec![T::zero(); n];
    for j in 2..n - 2 {
        let d1 = (-v[j + 2] + c::<T>(8.0) * (v[j + 1] - v[j - 1]) + v[j - 2]) / (twelve * h);
        let d2 = (-v[j + 2] + c::<T>(16.0) * (v[j + 1] + v[j - 1]) - c::<T>(30.0) * v[j] - v[j - 2]) / (twelve * h * h);
        f[j] = -av * d2 + av * ratios.linear_coefficient() * d1 + (av * ratios.n_c + lambda * cv) * v[j];
    }
    Ok((Profile::zero(), Profile::sampled(SampledFunction::new(*u.grid(), f, Interp::Linear)?)))
}

/// Space-time data `(F, f)` for `u(t, s) = g(t) v(s)`.
pub fn manufactured_parabolic<T: Real>(
    u: &ClosedForm<T>,
    g: TimeFn<T>,
    dg: TimeFn<T>,
    coeffs: &RoughCoefficients<T>,
    ratios: &LowerOrderRatios<T>,
    lambda: T,
) -> Result<(SpaceTimeData<T>, SpaceTimeData<T>)> {
    let (a0, a, _) = space_fields(coeffs)?;
    let (big_f, f) = manufactured_problem(u, coeffs, ratios, lambda)?;
    let (lo, hi) = u.support();
    let w = u.clone();
    let time_part = piecewise_profile(&a0, &a, lo, hi, move |m, _, s| m * w.eval(s));
    Ok((
        SpaceTimeData::separable(g.clone(), big_f),
        SpaceTimeData::separable(dg, time_part).plus(SpaceTimeData::separable(g, f)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_source_matches_hand_derivative() {
        let u = ClosedForm::gaussian(6.0f64);
        let (big_f, f) = manufactured_problem(&u, &RoughCoefficients::constant(1.0), &LowerOrderRatios::zero(), 0.0).unwrap();
        assert!(big_f.is_zero());
        for s in [-1.3f64, -0.2, 0.0, 0.7, 2.1] {
            let expect: f64 = (2.0 - 4.0 * s * s - 2.0 * s) * (-s * s).exp();
            assert!((f.eval(s) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let u = ClosedForm::bump(0.3f64, 1.2);
        let h = 1e-5;
        for s in [-0.5, 0.1, 0.9, 1.3] {
            let d1 = (u.eval(s + h) - u.eval(s - h)) / (2.0 * h);
            let d2 = (u.eval(s + h) - 2.0 * u.eval(s) + u.eval(s - h)) / (h * h);
            assert!((d1 - u.derivative(s)).abs() < 1e-8);
            assert!((d2 - u.second_derivative(s)).abs() < 1e-4);
        }
    }

    #[test]
    fn linear_in_the_solution() {
        let (u1, u2) = (ClosedForm::gaussian(6.0f64), ClosedForm::bump(1.0, 2.0));
        let coeffs = RoughCoefficients::constant(1.5);
        let r = LowerOrderRatios::new(0.3, -0.2, 0.7);
        let (_, f1) = manufactured_problem(&u1, &coeffs, &r, 2.0).unwrap();
        let (_, f2) = manufactured_problem(&u2, &coeffs, &r, 2.0).unwrap();
        let (_, f12) = manufactured_problem(&u1.plus(&u2), &coeffs, &r, 2.0).unwrap();
        for s in [-2.0, -0.4, 0.5, 1.7, 2.9] {
            assert!((f12.eval(s) - f1.eval(s) - f2.eval(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn samples_agree_with_closed_form() {
        let g = LogGrid::new(-8.0f64, 8.0, 1601).unwrap();
        let u = ClosedForm::gaussian(7.0);
        let coeffs = RoughCoefficients::constant(1.0);
        let r = LowerOrderRatios::zero();
        let (_, exact) = manufactured_problem(&u, &coeffs, &r, 1.0).unwrap();
        let (_, approx) = manufactured_from_samples(&u.sample(g).unwrap(), &coeffs, &r, 1.0).unwrap();
        for s in [-1.0, 0.0, 0.55, 2.0] {
            assert!((exact.eval(s) - approx.eval(s)).abs() < 1e-5);
        }
        let bad = SampledFunction::from_fn(g, |s| s).unwrap();
        assert!(matches!(manufactured_from_samples(&bad, &coeffs, &r, 1.0), Err(LabError::SupportError(_))));
    }

    #[test]
    fn zero_solution_zero_data() {
        let (big_f, f) = manufactured_problem(&ClosedForm::zero(), &RoughCoefficients::constant(1.0f64), &LowerOrderRatios::zero(), 1.0).unwrap();
        assert!(big_f.is_zero());
        assert!((-3..=3).all(|k| f.eval(k as f64 * 0.3) == 0.0));
    }
}
