//! Weighted function spaces on the half line in logarithmic coordinates.
//!
//! A function `u` on `(0, ∞)` is stored as `v(s) = u(e^s)` on a uniform
//! grid in `s`. The measure `x^{θ-1} dx` becomes `e^{θs} ds` and `x d/dx`
//! becomes `d/ds`.

mod bumps;
mod cutoff;
mod hardy;
mod muckenhoupt;
mod norms;

pub use bumps::{random_bump_family, SmoothBump};
pub use cutoff::{build_cutoff, CutoffFamily};
pub use hardy::{hardy_check, HardyReport, HARDY_FLOOR};
pub use muckenhoupt::{ap_constant_estimate, ap_levels, TimeWeight};
pub use norms::{dyadic_norm, h1_theta_norm, lp_theta_norm, weighted_power_integral};

use crate::error::{LabError, Result};
use crate::grid::LogGrid;
use crate::scalar::{c, Real};

/// How samples are extended between grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interp {
    /// Piecewise linear between node values.
    Linear,
    /// One value per cell, taken at the cell midpoint.
    CellConstant,
}

/// Function on `(0, ∞)` sampled on a logarithmic grid.
///
/// With [`Interp::Linear`] there is one value per node; with
/// [`Interp::CellConstant`] one value per cell. The function is zero
/// outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: LogGrid<T>,
    values: Vec<T>,
    deriv: Option<Vec<T>>,
    interp: Interp,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: LogGrid<T>, values: Vec<T>, interp: Interp) -> Result<Self> {
        let expect = match interp {
            Interp::Linear => grid.len(),
            Interp::CellConstant => grid.cells(),
        };
        if values.len() != expect {
            return Err(LabError::InvalidFunction(format!(
                "expected {expect} values for {interp:?}, got {}",
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::InvalidFunction(format!("non-finite value at index {j}")));
        }
        Ok(Self { grid, values, deriv: None, interp })
    }

    /// Node samples of `v(s)`.
    pub fn from_fn(grid: LogGrid<T>, v: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.nodes().into_iter().map(v).collect();
        Self::new(grid, values, Interp::Linear)
    }

    /// Node samples of `v(s)` together with exact samples of `v'(s)`.
    pub fn from_fn_with_derivative(
        grid: LogGrid<T>,
        v: impl Fn(T) -> T,
        dv: impl Fn(T) -> T,
    ) -> Result<Self> {
        let mut out = Self::from_fn(grid, v)?;
        let d: Vec<T> = grid.nodes().into_iter().map(dv).collect();
        if let Some(j) = d.iter().position(|v| !v.is_finite()) {
            return Err(LabError::InvalidFunction(format!("non-finite derivative at node {j}")));
        }
        out.deriv = Some(d);
        Ok(out)
    }

    /// Cell-midpoint samples of `v(s)`.
    pub fn cell_constant(grid: LogGrid<T>, v: impl Fn(T) -> T) -> Result<Self> {
        let h = grid.h();
        let values = (0..grid.cells()).map(|j| v(grid.s(j) + h * c(0.5))).collect();
        Self::new(grid, values, Interp::CellConstant)
    }

    /// Attaches exact derivative samples, one per node.
    pub fn with_derivative(mut self, d: Vec<T>) -> Result<Self> {
        if d.len() != self.grid.len() || self.interp != Interp::Linear {
            return Err(LabError::InvalidFunction(
                "derivative samples need a linear function and one value per node".into(),
            ));
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidFunction("non-finite derivative".into()));
        }
        self.deriv = Some(d);
        Ok(self)
    }

    pub fn grid(&self) -> &LogGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// Abscissae `x_j = e^{s_j}`.
    pub fn abscissae(&self) -> Vec<T> {
        (0..self.grid.len()).map(|j| self.grid.x(j)).collect()
    }

    /// `v(s)`; zero outside the grid.
    pub fn eval_s(&self, s: T) -> T {
        let g = &self.grid;
        if !g.contains(s) {
            return T::zero();
        }
        let j = g.cell_index(s);
        match self.interp {
            Interp::CellConstant => self.values[j],
            Interp::Linear => {
                let t = (s - g.s(j)) / g.h();
                self.values[j] + t * (self.values[j + 1] - self.values[j])
            }
        }
    }

    /// `u(x)`.
    pub fn eval_x(&self, x: T) -> T {
        if x > T::zero() {
            self.eval_s(x.ln())
        } else {
            T::zero()
        }
    }

    /// Node values of `v`: the samples themselves, or for cell data the
    /// average of the two adjacent cells (zero beyond the ends).
    pub fn node_values(&self) -> Vec<T> {
        match self.interp {
            Interp::Linear => self.values.clone(),
            Interp::CellConstant => {
                let m = self.values.len();
                (0..=m)
                    .map(|j| {
                        let left = if j > 0 { self.values[j - 1] } else { T::zero() };
                        let right = if j < m { self.values[j] } else { T::zero() };
                        (left + right) * c(0.5)
                    })
                    .collect()
            }
        }
    }

    /// Node values of `x u'(x) = v'(s)`: exact samples when attached,
    /// otherwise centered differences (second-order one-sided at the ends).
    pub fn derivative_nodes(&self) -> Vec<T> {
        if let Some(d) = &self.deriv {
            return d.clone();
        }
        let v = self.node_values();
        let n = v.len();
        let h = self.grid.h();
        let two_h = h * c(2.0);
        let mut d = vec![T::zero(); n];
        for j in 1..n - 1 {
            d[j] = (v[j + 1] - v[j - 1]) / two_h;
        }
        d[0] = (c::<T>(-3.0) * v[0] + c::<T>(4.0) * v[1] - v[2]) / two_h;
        d[n - 1] = (c::<T>(3.0) * v[n - 1] - c::<T>(4.0) * v[n - 2] + v[n - 3]) / two_h;
        d
    }

    /// `x u'(x)` as a linear sampled function.
    pub fn log_derivative(&self) -> SampledFunction<T> {
        SampledFunction {
            grid: self.grid,
            values: self.derivative_nodes(),
            deriv: None,
            interp: Interp::Linear,
        }
    }

    /// `k u`.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| *v * k).collect(),
            deriv: self.deriv.as_ref().map(|d| d.iter().map(|v| *v * k).collect()),
            interp: self.interp,
        }
    }

    /// `x^γ u`.
    pub fn times_power(&self, gamma: T) -> Self {
        let g = &self.grid;
        let h = g.h();
        let at = |j: usize| match self.interp {
            Interp::Linear => g.s(j),
            Interp::CellConstant => g.s(j) + h * c(0.5),
        };
        let values: Vec<T> = self.values.iter().enumerate().map(|(j, v)| *v * (gamma * at(j)).exp()).collect();
        let deriv = self.deriv.as_ref().map(|d| {
            d.iter()
                .zip(&self.values)
                .enumerate()
                .map(|(j, (dv, v))| (*dv + gamma * *v) * (gamma * at(j)).exp())
                .collect()
        });
        Self { grid: self.grid, values, deriv, interp: self.interp }
    }

    /// Same samples on a grid translated by `ds`, i.e. `x ↦ u(x e^{-ds})`.
    pub fn shifted(&self, ds: T) -> Self {
        Self { grid: self.grid.shifted(ds), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    /// Smallest `s`-interval outside which the function vanishes, if any.
    pub fn support_s(&self) -> Option<(T, T)> {
        let first = self.values.iter().position(|v| *v != T::zero())?;
        let last = self.values.iter().rposition(|v| *v != T::zero())?;
        let g = &self.grid;
        Some(match self.interp {
            Interp::Linear => (g.s(first.saturating_sub(1)), g.s((last + 1).min(g.len() - 1))),
            Interp::CellConstant => (g.s(first), g.s(last + 1)),
        })
    }
}

/// Exponents of a weighted Lebesgue or Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec<T> {
    pub p: T,
    pub theta: T,
    pub q: T,
}

impl<T: Real> NormSpec<T> {
    /// `q = p`.
    pub fn new(p: T, theta: T) -> Result<Self> {
        Self::with_time_exponent(p, theta, p)
    }

    pub fn with_time_exponent(p: T, theta: T, q: T) -> Result<Self> {
        let spec = Self { p, theta, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > T::one()) || !self.p.is_finite() {
            return Err(LabError::InvalidSpec(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.q > T::one()) || !self.q.is_finite() {
            return Err(LabError::InvalidSpec(format!("q must exceed 1, got {}", self.q)));
        }
        if !self.theta.is_finite() {
            return Err(LabError::InvalidSpec(format!("theta must be finite, got {}", self.theta)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> LogGrid<f64> {
        LogGrid::new(-1.0, 1.0, 21).unwrap()
    }

    #[test]
    fn rejects_bad_samples() {
        let g = grid();
        assert!(matches!(
            SampledFunction::new(g, vec![0.0; 20], Interp::Linear),
            Err(LabError::InvalidFunction(_))
        ));
        let mut v = vec![0.0; 21];
        v[3] = f64::NAN;
        assert!(SampledFunction::new(g, v, Interp::Linear).is_err());
        assert!(SampledFunction::new(g, vec![1.0; 20], Interp::CellConstant).is_ok());
    }

    #[test]
    fn linear_interpolation_and_zero_extension() {
        let u = SampledFunction::from_fn(grid(), |s| 2.0 * s + 1.0).unwrap();
        assert!((u.eval_s(0.333) - 1.666).abs() < 1e-12);
        assert_eq!(u.eval_s(1.5), 0.0);
        assert!((u.eval_x(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centered_derivative_exact_for_quadratics() {
        let u = SampledFunction::from_fn(grid(), |s| s * s).unwrap();
        let d = u.derivative_nodes();
        for (j, s) in grid().nodes().iter().enumerate() {
            assert!((d[j] - 2.0 * s).abs() < 1e-12);
        }
    }

    #[test]
    fn power_multiplication_updates_exact_derivative() {
        let g = grid();
        let u = SampledFunction::from_fn_with_derivative(g, |s| s.sin(), |s| s.cos()).unwrap();
        let w = u.times_power(0.5);
        let d = w.derivative_nodes();
        for (j, s) in g.nodes().iter().enumerate() {
            let expect = (s.cos() + 0.5 * s.sin()) * (0.5 * s).exp();
            assert!((d[j] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn support_of_cell_data() {
        let g = grid();
        let u = SampledFunction::cell_constant(g, |s| if s > 0.0 && s < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let (a, b) = u.support_s().unwrap();
        assert!(a.abs() < 1e-12 && (b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn norm_spec_validation() {
        assert!(NormSpec::new(1.0, 0.0).is_err());
        assert!(NormSpec::with_time_exponent(2.0, 0.0, 0.5).is_err());
        assert_eq!(NormSpec::new(3.0, 1.0).unwrap().q, 3.0);
    }
}
