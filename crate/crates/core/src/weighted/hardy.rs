use super::{NormSpec, SampledFunction};
use crate::error::{LabError, Result};
use crate::quadrature::simpson;
use crate::scalar::{c, Real};

/// Floor applied to `|u|` in `|u|^{p-2}` when `p < 2`.
pub const HARDY_FLOOR: f64 = 1e-30;

/// Both sides of
/// `(θ²/p²) ∫|u|^p x^{θ-1} dx ≤ ∫ |u|^{p-2} (Du)² x^{θ+1} dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
    pub slack: T,
    /// Relative tolerance used for `holds`.
    pub tol: T,
    /// Nodes where `u = 0` but `Du ≠ 0` and the floor was applied (`p < 2` only).
    pub floored_nodes: usize,
}

/// Evaluates both sides of the weighted Hardy inequality for `u`.
///
/// Integrals use composite Simpson on the node samples; the derivative is
/// the attached exact one when present. `u` must vanish (relative
/// `1e-10`) at both grid ends.
pub fn hardy_check<T: Real>(u: &SampledFunction<T>, spec: &NormSpec<T>) -> Result<HardyReport<T>> {
    spec.validate()?;
    let tol = c::<T>(1e-8);
    let v = u.node_values();
    let scale = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale == T::zero() {
        return Ok(HardyReport { lhs: T::zero(), rhs: T::zero(), holds: true, slack: T::zero(), tol, floored_nodes: 0 });
    }
    let edge = c::<T>(1e-10) * scale;
    if v[0].abs() > edge || v[v.len() - 1].abs() > edge {
        return Err(LabError::SupportError(format!(
            "function does not vanish at the grid ends (|u| = {}, {} against max {scale})",
            v[0].abs(),
            v[v.len() - 1].abs()
        )));
    }
    let d = u.derivative_nodes();
    let g = u.grid();
    let p = spec.p;
    let theta = spec.theta;
    let two = c::<T>(2.0);
    let floor = c::<T>(HARDY_FLOOR);
    let mut floored_nodes = 0;
    let mut lhs_samples = Vec::with_capacity(v.len());
    let mut rhs_samples = Vec::with_capacity(v.len());
    for (j, (&vj, &dj)) in v.iter().zip(&d).enumerate() {
        let w = (theta * g.s(j)).exp();
        let a = vj.abs();
        lhs_samples.push(a.powf(p) * w);
        let base = if p < two && a < floor {
            if dj != T::zero() {
                floored_nodes += 1;
            }
            floor
        } else {
            a
        };
        rhs_samples.push(if p == two { dj * dj * w } else { base.powf(p - two) * dj * dj * w });
    }
    let lhs = theta * theta / (p * p) * simpson(&lhs_samples, g.h());
    let rhs = simpson(&rhs_samples, g.h());
    Ok(HardyReport { lhs, rhs, holds: lhs <= rhs * (T::one() + tol), slack: rhs - lhs, tol, floored_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::LogGrid;

    fn x_exp(n: usize) -> SampledFunction<f64> {
        let g = LogGrid::new(-30.0, 4.5, n).unwrap();
        SampledFunction::from_fn_with_derivative(
            g,
            |s: f64| (s - s.exp()).exp(),
            |s: f64| (s - s.exp()).exp() * (1.0 - s.exp()),
        )
        .unwrap()
    }

    #[test]
    fn gamma_integral_case() {
        let r = hardy_check(&x_exp(16385), &NormSpec::new(2.0, 1.0).unwrap()).unwrap();
        assert!((r.lhs - 1.0 / 16.0).abs() < 1e-10, "{}", r.lhs);
        assert!((r.rhs - 0.25).abs() < 1e-10, "{}", r.rhs);
        assert!(r.holds);
    }

    #[test]
    fn theta_zero_gives_zero_lhs() {
        let r = hardy_check(&x_exp(4097), &NormSpec::new(3.0, 0.0).unwrap()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds && r.rhs > 0.0);
    }

    #[test]
    fn boundary_mass_is_rejected() {
        let g = LogGrid::new(-1.0, 1.0, 65).unwrap();
        let u = SampledFunction::from_fn(g, |s| 1.0 + s * s).unwrap();
        assert!(matches!(hardy_check(&u, &NormSpec::new(2.0, 1.0).unwrap()), Err(LabError::SupportError(_))));
    }
}
