//! Closed-form and sampled data `F`, `f` for the 1D equations.
//!
//! A [`Profile`] is a function of `s = log x` of the form
//! `Σ_k c_k e^{z_k s} b_k(s + σ_k)` where each base `b_k` is a step
//! function, a smooth compactly supported closure, or sampled data. This
//! class is closed under the operations the solvers need: scaling, sums,
//! multiplication by `x^γ`, and dilation `x ↦ σx`.

use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::grid::LogGrid;
use crate::quadrature::{gauss_legendre8, integrate_with_breaks, AdaptiveTol};
use crate::scalar::{c, Real};
use crate::weighted::{Interp, SampledFunction};

pub type SmoothFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub enum Base<T> {
    /// Disjoint `(lo, hi, value)` pieces in `s`, sorted.
    Steps(Vec<(T, T, T)>),
    /// Closure in `s` vanishing outside `(lo, hi)`.
    Smooth { f: SmoothFn<T>, lo: T, hi: T },
    Sampled(SampledFunction<T>),
}

impl<T: fmt::Debug> fmt::Debug for Base<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Steps(p) => f.debug_tuple("Steps").field(p).finish(),
            Self::Smooth { lo, hi, .. } => f.debug_struct("Smooth").field("lo", lo).field("hi", hi).finish(),
            Self::Sampled(u) => f.debug_tuple("Sampled").field(u).finish(),
        }
    }
}

impl<T: Real> Base<T> {
    fn eval(&self, s: T) -> T {
        match self {
            Self::Steps(pieces) => pieces
                .iter()
                .find(|(lo, hi, _)| s >= *lo && s < *hi)
                .map_or(T::zero(), |p| p.2),
            Self::Smooth { f, lo, hi } => {
                if s > *lo && s < *hi {
                    f(s)
                } else {
                    T::zero()
                }
            }
            Self::Sampled(u) => u.eval_s(s),
        }
    }

    fn support(&self) -> Option<(T, T)> {
        match self {
            Self::Steps(pieces) => {
                let nz: Vec<_> = pieces.iter().filter(|p| p.2 != T::zero()).collect();
                Some((nz.first()?.0, nz.last()?.1))
            }
            Self::Smooth { lo, hi, .. } => Some((*lo, *hi)),
            Self::Sampled(u) => u.support_s(),
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        match self {
            Self::Steps(pieces) => pieces.iter().flat_map(|p| [p.0, p.1]).collect(),
            Self::Smooth { lo, hi, .. } => vec![*lo, *hi],
            Self::Sampled(u) => match u.support_s() {
                None => Vec::new(),
                Some((a, b)) => {
                    let g = u.grid();
                    let mut pts: Vec<T> = g.nodes().into_iter().filter(|s| *s >= a && *s <= b).collect();
                    if u.interp() == Interp::CellConstant {
                        pts.push(a);
                        pts.push(b);
                    }
                    pts
                }
            },
        }
    }
}

/// One summand `coeff · e^{exponent s} · base(s + shift)`.
#[derive(Debug, Clone)]
pub struct Term<T> {
    pub coeff: T,
    pub exponent: T,
    pub shift: T,
    pub base: Base<T>,
}

/// Data function on `(0, ∞)` written in `s = log x`.
#[derive(Debug, Clone, Default)]
pub struct Profile<T> {
    terms: Vec<Term<T>>,
}

impl<T: Real> Profile<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn from_base(base: Base<T>) -> Self {
        Self { terms: vec![Term { coeff: T::one(), exponent: T::zero(), shift: T::zero(), base }] }
    }

    /// `k · 1_{[x0, x1]}(x)`.
    pub fn indicator_x(x0: T, x1: T, k: T) -> Result<Self> {
        if !(x0 > T::zero()) || !(x1 > x0) {
            return Err(LabError::InvalidFunction(format!("need 0 < x0 < x1, got [{x0}, {x1}]")));
        }
        Ok(Self::from_base(Base::Steps(vec![(x0.ln(), x1.ln(), k)])))
    }

    /// Step function with `(lo, hi, value)` pieces in `s`.
    pub fn steps_s(mut pieces: Vec<(T, T, T)>) -> Result<Self> {
        pieces.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        for w in pieces.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(LabError::InvalidFunction("overlapping step pieces".into()));
            }
        }
        if pieces.iter().any(|p| !(p.0 < p.1) || !p.2.is_finite()) {
            return Err(LabError::InvalidFunction("step pieces need lo < hi and finite values".into()));
        }
        Ok(Self::from_base(Base::Steps(pieces)))
    }

    /// Smooth closure in `s`, zero outside `(lo, hi)`.
    pub fn smooth_s(f: impl Fn(T) -> T + Send + Sync + 'static, lo: T, hi: T) -> Self {
        Self::from_base(Base::Smooth { f: Arc::new(f), lo, hi })
    }

    pub fn sampled(u: SampledFunction<T>) -> Self {
        Self::from_base(Base::Sampled(u))
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == T::zero() || t.base.support().is_none())
    }

    pub fn eval(&self, s: T) -> T {
        self.terms
            .iter()
            .map(|t| {
                if t.coeff == T::zero() {
                    return T::zero();
                }
                let b = t.base.eval(s + t.shift);
                if b == T::zero() {
                    T::zero()
                } else {
                    t.coeff * (t.exponent * s).exp() * b
                }
            })
            .sum()
    }

    pub fn eval_x(&self, x: T) -> T {
        if x > T::zero() {
            self.eval(x.ln())
        } else {
            T::zero()
        }
    }

    /// Hull of the supports in `s`.
    pub fn support(&self) -> Option<(T, T)> {
        self.terms
            .iter()
            .filter(|t| t.coeff != T::zero())
            .filter_map(|t| t.base.support().map(|(a, b)| (a - t.shift, b - t.shift)))
            .reduce(|(a, b), (c0, d)| (a.min(c0), b.max(d)))
    }

    /// Sorted points in `s` where the profile may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts: Vec<T> = self
            .terms
            .iter()
            .filter(|t| t.coeff != T::zero())
            .flat_map(|t| t.base.breakpoints().into_iter().map(move |b| b - t.shift))
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        pts.dedup();
        pts
    }

    pub fn scaled(&self, k: T) -> Self {
        Self { terms: self.terms.iter().map(|t| Term { coeff: t.coeff * k, ..t.clone() }).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    /// `x^γ g(x)`.
    pub fn times_power(&self, gamma: T) -> Self {
        Self {
            terms: self.terms.iter().map(|t| Term { exponent: t.exponent + gamma, ..t.clone() }).collect(),
        }
    }

    /// `x ↦ g(σx)`.
    pub fn dilated(&self, sigma: T) -> Self {
        let ls = sigma.ln();
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: t.coeff * (t.exponent * ls).exp(), shift: t.shift + ls, ..t.clone() })
                .collect(),
        }
    }

    /// `∫_lo^hi w(s) g(s) ds` by eight-point Gauss panels no wider than
    /// `max_panel`, split at the breakpoints in `bps` (sorted).
    pub fn integrate_weighted(&self, lo: T, hi: T, bps: &[T], max_panel: T, w: impl Fn(T) -> T) -> T {
        if hi <= lo {
            return T::zero();
        }
        let start = bps.partition_point(|b| *b <= lo);
        let mut acc = T::zero();
        let mut a = lo;
        for &b in bps[start..].iter().take_while(|b| **b < hi).chain(std::iter::once(&hi)) {
            if b > a {
                let panels = ((b - a) / max_panel).ceil().to_usize().unwrap_or(1).max(1);
                let width = (b - a) / T::from_usize_lossy(panels);
                for k in 0..panels {
                    let p0 = a + width * T::from_usize_lossy(k);
                    let p1 = if k + 1 == panels { b } else { p0 + width };
                    acc += gauss_legendre8(p0, p1, |s| w(s) * self.eval(s));
                }
            }
            a = b;
        }
        acc
    }

    /// `(∫ |g(s)|^p e^{z s} ds)^{1/p}` by adaptive quadrature between breakpoints.
    pub fn weighted_lp(&self, p: T, z: T) -> Result<T> {
        let Some((lo, hi)) = self.support() else {
            return Ok(T::zero());
        };
        let mut pts: Vec<T> = self.breakpoints().into_iter().filter(|b| *b > lo && *b < hi).collect();
        pts.insert(0, lo);
        pts.push(hi);
        let tol = AdaptiveTol { abs: c(1e-300), rel: c(1e-11), max_intervals: 20_000 };
        let (v, _) = integrate_with_breaks(|s| self.eval(s).abs().powf(p) * (z * s).exp(), &pts, tol)?;
        Ok(v.powf(p.recip()))
    }

    /// Node samples on `grid`.
    pub fn sample(&self, grid: LogGrid<T>) -> Result<SampledFunction<T>> {
        SampledFunction::from_fn(grid, |s| self.eval(s))
    }
}
