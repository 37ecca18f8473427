use crate::error::{LabError, Result};
use crate::scalar::{c, Real};

/// Discriminant below which the indicial roots count as a double root.
pub const DISCRIMINANT_TOL: f64 = 1e-10;
/// Distance from `αp` or `βp` below which `θ` is refused.
pub const FORBIDDEN_TOL: f64 = 1e-8;

/// `(n_b, n_b̂, n_c)`: lower-order coefficients divided by the leading one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LowerOrderRatios<T> {
    pub n_b: T,
    pub n_bhat: T,
    pub n_c: T,
}

impl<T: Real> LowerOrderRatios<T> {
    pub fn new(n_b: T, n_bhat: T, n_c: T) -> Self {
        Self { n_b, n_bhat, n_c }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// `1 + n_b + n_b̂`, the linear coefficient of the indicial quadratic.
    pub fn linear_coefficient(&self) -> T {
        T::one() + self.n_b + self.n_bhat
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_b.is_finite() && self.n_bhat.is_finite() && self.n_c.is_finite()) {
            return Err(LabError::InvalidCoefficients(format!("non-finite ratios {self:?}")));
        }
        Ok(())
    }
}

/// Roots `α < β` of `z² + (1 + n_b + n_b̂) z - n_c = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicialRoots<T> {
    pub alpha: T,
    pub beta: T,
}

pub fn indicial_roots<T: Real>(ratios: &LowerOrderRatios<T>) -> Result<IndicialRoots<T>> {
    ratios.validate()?;
    let b = ratios.linear_coefficient();
    let disc = b * b + c::<T>(4.0) * ratios.n_c;
    if !(disc > c(DISCRIMINANT_TOL)) {
        return Err(LabError::DegenerateRoots { discriminant: disc.to_f64_lossy() });
    }
    let sign = if b < T::zero() { -T::one() } else { T::one() };
    let q = -(b + sign * disc.sqrt()) * c(0.5);
    let other = -ratios.n_c / q;
    Ok(IndicialRoots { alpha: q.min(other), beta: q.max(other) })
}

/// Which of the three solvable regimes a weight exponent falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `θ < αp`.
    Below,
    /// `αp < θ < βp`.
    Inside,
    /// `θ > βp`.
    Above,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Below => "below",
            Self::Inside => "inside",
            Self::Above => "above",
        }
    }
}

/// The window `(αp, βp)` and its exterior rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaWindow<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> ThetaWindow<T> {
    pub fn contains(&self, theta: T) -> bool {
        theta > self.lower && theta < self.upper
    }

    /// The two excluded exponents `αp`, `βp`.
    pub fn forbidden(&self) -> [T; 2] {
        [self.lower, self.upper]
    }

    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) * c(0.5)
    }

    /// Regime of `θ`, or [`LabError::ForbiddenExponent`] within
    /// [`FORBIDDEN_TOL`] of an endpoint.
    pub fn regime(&self, theta: T) -> Result<Regime> {
        for e in self.forbidden() {
            if (theta - e).abs() < c(FORBIDDEN_TOL) {
                return Err(LabError::ForbiddenExponent { theta: theta.to_f64_lossy(), endpoint: e.to_f64_lossy() });
            }
        }
        Ok(if theta < self.lower {
            Regime::Below
        } else if theta > self.upper {
            Regime::Above
        } else {
            Regime::Inside
        })
    }
}

/// `(αp, βp)`.
pub fn admissible_theta<T: Real>(roots: &IndicialRoots<T>, p: T) -> Result<ThetaWindow<T>> {
    if !(p > T::one()) {
        return Err(LabError::InvalidSpec(format!("p must exceed 1, got {p}")));
    }
    Ok(ThetaWindow { lower: roots.alpha * p, upper: roots.beta * p })
}
