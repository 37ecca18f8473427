//! Closed-form machinery for the one-dimensional equations: indicial
//! roots and the admissible weight window, gauge shifts, the exact
//! solution of the Euler-type equation
//!
//! `-x² D(a D u) + x b D u + x D(b̂ u) + c u + λ u = D F + f`
//!
//! with constant coefficients, and the lognormal transition density.

mod black_scholes;
mod euler;
mod gauge;
mod roots;

pub use black_scholes::{bs_density, bs_expectation, bs_solve, BSParams, Payoff};
pub use euler::{euler_solve_exact, ExactSolution};
pub use gauge::{gauge_shift, normalizing_gamma, shift_ratios};
pub use roots::{
    admissible_theta, indicial_roots, IndicialRoots, LowerOrderRatios, Regime, ThetaWindow, DISCRIMINANT_TOL,
    FORBIDDEN_TOL,
};

use crate::error::{LabError, Result};
use crate::profile::Profile;
use crate::scalar::Real;

/// Constant-coefficient problem on `(0, ∞)`.
///
/// In `s = log x` the operator reads
/// `-a v'' + a (1 + n_b + n_b̂) v' + (a n_c + λ) v`, and the right side is
/// `e^{-s} F̃' + f̃`.
#[derive(Debug, Clone)]
pub struct EulerProblem<T> {
    pub a: T,
    pub ratios: LowerOrderRatios<T>,
    pub big_f: Profile<T>,
    pub f: Profile<T>,
    pub lambda: T,
}

impl<T: Real> EulerProblem<T> {
    pub fn new(a: T, ratios: LowerOrderRatios<T>, big_f: Profile<T>, f: Profile<T>) -> Self {
        Self { a, ratios, big_f, f, lambda: T::zero() }
    }

    pub fn with_lambda(self, lambda: T) -> Self {
        Self { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > T::zero()) || !self.a.is_finite() {
            return Err(LabError::InvalidCoefficients(format!("leading coefficient must be positive, got {}", self.a)));
        }
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(LabError::InvalidCoefficients(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        self.ratios.validate()
    }

    /// Ratios with `λ` folded into the zeroth-order term.
    pub fn effective_ratios(&self) -> LowerOrderRatios<T> {
        LowerOrderRatios { n_c: self.ratios.n_c + self.lambda / self.a, ..self.ratios }
    }

    /// Indicial roots of the operator including `λ`.
    pub fn roots(&self) -> Result<IndicialRoots<T>> {
        indicial_roots(&self.effective_ratios())
    }

    /// Data `F(σx)/σ`, `f(σx)`, whose solution is `u(σx)`.
    pub fn dilated(&self, sigma: T) -> Self {
        Self {
            big_f: self.big_f.dilated(sigma).scaled(sigma.recip()),
            f: self.f.dilated(sigma),
            ..self.clone()
        }
    }

    /// Hull of the data supports in `s`.
    pub fn data_support(&self) -> Option<(T, T)> {
        match (self.big_f.support(), self.f.support()) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
        }
    }
}
