use crate::error::{LabError, Result};
use crate::quadrature::{integrate_with_breaks, AdaptiveTol};
use crate::scalar::{c, Real};
use crate::weighted::SampledFunction;

/// Terminal payoff `h(y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Payoff<T> {
    Call(T),
    Put(T),
    /// `1_{[lo, hi]}(y)`.
    Indicator(T, T),
    Constant(T),
    /// `h(y) = y`.
    Identity,
    /// Samples on a log grid in `y`, zero outside it.
    Samples(SampledFunction<T>),
}

impl<T: Real> Payoff<T> {
    pub fn eval(&self, y: T) -> T {
        match self {
            Self::Call(k) => (y - *k).max(T::zero()),
            Self::Put(k) => (*k - y).max(T::zero()),
            Self::Indicator(lo, hi) => {
                if y >= *lo && y <= *hi {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Constant(v) => *v,
            Self::Identity => y,
            Self::Samples(u) => u.eval_x(y),
        }
    }

    /// Kinks and jumps in `log y`.
    fn log_breakpoints(&self) -> Vec<T> {
        match self {
            Self::Call(k) | Self::Put(k) => vec![k.ln()],
            Self::Indicator(lo, hi) => vec![lo.ln(), hi.ln()],
            Self::Constant(_) | Self::Identity => Vec::new(),
            Self::Samples(u) => {
                let g = u.grid();
                if g.len() <= 256 {
                    g.nodes()
                } else {
                    vec![g.s_min(), g.s_max()]
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            Self::Call(k) | Self::Put(k) => !(*k > T::zero()) || !k.is_finite(),
            Self::Indicator(lo, hi) => !(*lo > T::zero()) || !(hi > lo) || !hi.is_finite(),
            Self::Constant(v) => !v.is_finite(),
            Self::Identity | Self::Samples(_) => false,
        };
        if bad {
            return Err(LabError::InvalidFunction(format!("invalid payoff {self:?}")));
        }
        Ok(())
    }
}

/// Geometric Brownian motion with volatility `sigma`, rate `r`, time to
/// maturity `horizon`, and terminal payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct BSParams<T> {
    pub sigma: T,
    pub r: T,
    pub horizon: T,
    pub payoff: Payoff<T>,
}

impl<T: Real> BSParams<T> {
    pub fn new(sigma: T, r: T, horizon: T, payoff: Payoff<T>) -> Result<Self> {
        let out = Self { sigma, r, horizon, payoff };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(LabError::InvalidSpec(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.horizon > T::zero()) || !self.horizon.is_finite() {
            return Err(LabError::InvalidSpec(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !self.r.is_finite() {
            return Err(LabError::InvalidSpec(format!("rate must be finite, got {}", self.r)));
        }
        self.payoff.validate()
    }

    /// Mean and standard deviation of `log y` given `log x = lx`.
    fn log_moments(&self, lx: T) -> (T, T) {
        let var = self.sigma * self.sigma * self.horizon;
        (lx + (self.r - self.sigma * self.sigma * c(0.5)) * self.horizon, var.sqrt())
    }
}

/// Transition density of `y` at maturity from `x` now.
pub fn bs_density<T: Real>(x: T, y: T, params: &BSParams<T>) -> Result<T> {
    if !(x > T::zero()) || !(y > T::zero()) {
        return Err(LabError::DomainError(format!("density needs x, y > 0, got x={x}, y={y}")));
    }
    params.validate()?;
    let (m, sd) = params.log_moments(x.ln());
    let z = (y.ln() - m) / sd;
    Ok((-(z * z) * c(0.5)).exp() / (y * sd * (T::PI() + T::PI()).sqrt()))
}

/// `∫ g(y) p(x, y) dy` computed in `log y` with the Gaussian truncated at
/// `±(8 + 2 sd)` standard deviations.
pub fn bs_expectation<T: Real>(x: T, params: &BSParams<T>, g: impl Fn(T) -> T, breaks: &[T]) -> Result<T> {
    if !(x > T::zero()) {
        return Err(LabError::DomainError(format!("spot must be positive, got {x}")));
    }
    params.validate()?;
    let (m, sd) = params.log_moments(x.ln());
    let width = sd * (c::<T>(8.0) + sd + sd);
    let (lo, hi) = (m - width, m + width);
    let mut pts = vec![lo, hi];
    pts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    pts.push(m);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let norm = (sd * (T::PI() + T::PI()).sqrt()).recip();
    let integrand = |ly: T| {
        let z = (ly - m) / sd;
        g(ly.exp()) * (-(z * z) * c(0.5)).exp() * norm
    };
    let tol = AdaptiveTol { abs: c(1e-13), rel: c(1e-11), max_intervals: 20_000 };
    let (v, _) = integrate_with_breaks(integrand, &pts, tol)?;
    Ok(v)
}

/// Discounted expected payoff `e^{-r h} ∫ h(y) p(x, y) dy`.
pub fn bs_solve<T: Real>(params: &BSParams<T>, x: T) -> Result<T> {
    let bps = params.payoff.log_breakpoints();
    let e = bs_expectation(x, params, |y| params.payoff.eval(y), &bps)?;
    Ok((-params.r * params.horizon).exp() * e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(payoff: Payoff<f64>) -> BSParams<f64> {
        BSParams::new(0.2, 0.05, 1.0, payoff).unwrap()
    }

    #[test]
    fn reference_call() {
        let v = bs_solve(&params(Payoff::Call(100.0)), 100.0).unwrap();
        assert!((v - 10.4506).abs() < 1e-3, "{v}");
    }

    #[test]
    fn constant_and_identity_payoffs() {
        let p = params(Payoff::Constant(1.0));
        assert!((bs_solve(&p, 80.0).unwrap() - (-0.05f64).exp()).abs() < 1e-10);
        let p = params(Payoff::Identity);
        assert!((bs_solve(&p, 80.0).unwrap() - 80.0).abs() < 1e-8);
    }

    #[test]
    fn put_call_parity() {
        let call = bs_solve(&params(Payoff::Call(90.0)), 100.0).unwrap();
        let put = bs_solve(&params(Payoff::Put(90.0)), 100.0).unwrap();
        assert!((call - put - (100.0 - 90.0 * (-0.05f64).exp())).abs() < 1e-8);
    }

    #[test]
    fn density_mode_for_small_volatility() {
        let p = BSParams::new(0.01, 0.05, 1.0, Payoff::Constant(1.0)).unwrap();
        let mode = 100.0 * (0.05f64 - 0.00005).exp();
        let at = bs_density(100.0, mode, &p).unwrap();
        assert!(at > bs_density(100.0, mode * 1.01, &p).unwrap());
        assert!(at > bs_density(100.0, mode * 0.99, &p).unwrap());
    }

    #[test]
    fn domain_errors() {
        let p = params(Payoff::Constant(1.0));
        assert!(matches!(bs_density(0.0, 1.0, &p), Err(LabError::DomainError(_))));
        assert!(matches!(bs_density(1.0, -1.0, &p), Err(LabError::DomainError(_))));
        assert!(BSParams::new(0.0, 0.05, 1.0, Payoff::Constant(1.0)).is_err());
        assert!(BSParams::new(0.2, 0.05, 1.0, Payoff::Call(-1.0)).is_err());
    }
}
