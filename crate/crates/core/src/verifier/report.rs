use crate::exact1d::Regime;
use crate::scalar::Real;

/// Which solver produced the solution behind a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Exact,
    Fd,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Fd => "fd",
        }
    }
}

/// Both sides of the a priori estimate
/// `(1 + √λ)‖u‖ + ‖x Du‖ ≤ N (‖x⁻¹F‖ + ‖f‖/(1 + √λ))`
/// in `L_{p,θ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<T> {
    pub lhs: T,
    pub rhs: T,
    /// `lhs / rhs`, or 0 when both vanish.
    pub ratio: T,
    pub u_norm: T,
    pub xdu_norm: T,
    pub big_f_norm: T,
    pub f_norm: T,
    pub p: T,
    pub q: T,
    pub theta: T,
    pub lambda: T,
    pub grid_id: String,
    pub coeff_id: String,
    pub solver: SolverKind,
    /// Regime of `θ` relative to the window, when the roots are defined.
    pub regime: Option<Regime>,
    pub window_violation: bool,
}

impl<T: Real> EstimateReport<T> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        u_norm: T,
        xdu_norm: T,
        big_f_norm: T,
        f_norm: T,
        p: T,
        theta: T,
        lambda: T,
        grid_id: String,
        coeff_id: String,
        solver: SolverKind,
    ) -> Self {
        let w = T::one() + lambda.sqrt();
        let lhs = w * u_norm + xdu_norm;
        let rhs = big_f_norm + f_norm / w;
        Self {
            lhs,
            rhs,
            ratio: estimate_ratio(lhs, rhs),
            u_norm,
            xdu_norm,
            big_f_norm,
            f_norm,
            p,
            q: p,
            theta,
            lambda,
            grid_id,
            coeff_id,
            solver,
            regime: None,
            window_violation: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lhs.is_finite() && self.rhs.is_finite() && self.ratio.is_finite()
    }
}

/// `lhs / rhs` with `0/0 = 0` and `x/0 = ∞`.
pub fn estimate_ratio<T: Real>(lhs: T, rhs: T) -> T {
    if rhs > T::zero() {
        lhs / rhs
    } else if lhs == T::zero() {
        T::zero()
    } else {
        T::infinity()
    }
}
