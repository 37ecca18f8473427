use super::{CutoffFamily, Interp, NormSpec, SampledFunction};
use crate::error::{LabError, Result};
use crate::grid::LogGrid;
use crate::quadrature::gauss_legendre8;
use crate::scalar::Real;

/// `∫_lo^hi e^{z s} ds`.
pub fn weighted_power_integral<T: Real>(lo: T, hi: T, z: T) -> T {
    let w = hi - lo;
    let zw = z * w;
    if zw.abs() < T::epsilon() {
        return w * (z * lo).exp();
    }
    (z * lo).exp() * zw.exp_m1() / z
}

/// `∫ |ℓ(s)|^p e^{θs} ds` over one cell, `ℓ` linear from `v0` to `v1`.
fn linear_cell<T: Real>(s0: T, h: T, v0: T, v1: T, p: T, theta: T) -> T {
    if v0 == T::zero() && v1 == T::zero() {
        return T::zero();
    }
    let lin = |s: T| v0 + (v1 - v0) * (s - s0) / h;
    let f = |s: T| lin(s).abs().powf(p) * (theta * s).exp();
    let s1 = s0 + h;
    if (v0 < T::zero()) != (v1 < T::zero()) && v0 != T::zero() && v1 != T::zero() {
        let r = s0 + h * v0 / (v0 - v1);
        gauss_legendre8(s0, r, f) + gauss_legendre8(r, s1, f)
    } else {
        gauss_legendre8(s0, s1, f)
    }
}

/// `∫ |v|^p e^{θs} ds` for node values interpolated linearly.
pub(crate) fn linear_pth_power<T: Real>(grid: &LogGrid<T>, values: &[T], p: T, theta: T) -> T {
    let h = grid.h();
    (0..grid.cells())
        .map(|j| linear_cell(grid.s(j), h, values[j], values[j + 1], p, theta))
        .sum()
}

/// `‖u‖_{L_{p,θ}}^p`.
pub(crate) fn lp_pth_power<T: Real>(u: &SampledFunction<T>, p: T, theta: T) -> T {
    let g = u.grid();
    match u.interp() {
        Interp::Linear => linear_pth_power(g, u.values(), p, theta),
        Interp::CellConstant => (0..g.cells())
            .map(|j| {
                let v = u.values()[j];
                if v == T::zero() {
                    T::zero()
                } else {
                    v.abs().powf(p) * weighted_power_integral(g.s(j), g.s(j + 1), theta)
                }
            })
            .sum(),
    }
}

/// `(∫_0^∞ |u|^p x^{θ-1} dx)^{1/p}`, integrated exactly per cell for
/// the interpolant.
pub fn lp_theta_norm<T: Real>(u: &SampledFunction<T>, spec: &NormSpec<T>) -> Result<T> {
    spec.validate()?;
    Ok(lp_pth_power(u, spec.p, spec.theta).powf(spec.p.recip()))
}

/// `(‖u‖^p + ‖x Du‖^p)^{1/p}` in `L_{p,θ}`.
pub fn h1_theta_norm<T: Real>(u: &SampledFunction<T>, spec: &NormSpec<T>) -> Result<T> {
    spec.validate()?;
    let d = u.derivative_nodes();
    let a = lp_pth_power(u, spec.p, spec.theta);
    let b = linear_pth_power(u.grid(), &d, spec.p, spec.theta);
    Ok((a + b).powf(spec.p.recip()))
}

/// Localized norm
/// `(Σ_m e^{mθ} ‖u(e^m ·) ζ‖_{W^1_p}^p)^{1/p}` built from a cutoff family.
///
/// Errors with [`LabError::CoverageError`] if the family's shift range
/// misses a window that meets the support of `u`.
pub fn dyadic_norm<T: Real>(u: &SampledFunction<T>, spec: &NormSpec<T>, cut: &CutoffFamily<T>) -> Result<T> {
    spec.validate()?;
    let Some((sa, sb)) = u.support_s() else {
        return Ok(T::zero());
    };
    let w = cut.half_width();
    let m_lo = ((sa - w).floor() + T::one()).to_i64().unwrap_or(i64::MIN);
    let m_hi = ((sb + w).ceil() - T::one()).to_i64().unwrap_or(i64::MAX);
    let (k_lo, k_hi) = cut.shifts();
    if m_lo < k_lo || m_hi > k_hi {
        return Err(LabError::CoverageError(format!(
            "support needs shifts {m_lo}..={m_hi}, family has {k_lo}..={k_hi}"
        )));
    }
    let g = u.grid();
    let h = g.h();
    let v = u.node_values();
    let d = u.derivative_nodes();
    let p = spec.p;
    let mut total = T::zero();
    for m in m_lo..=m_hi {
        let mt = T::from_i64(m).expect("shift index");
        let lo = (mt - w).max(g.s_min());
        let hi = (mt + w).min(g.s_max());
        if lo >= hi {
            continue;
        }
        let j0 = g.cell_index(lo);
        let j1 = g.cell_index(hi);
        let mut acc = T::zero();
        for j in j0..=j1 {
            let a = g.s(j).max(lo);
            let b = g.s(j + 1).min(hi);
            if a >= b {
                continue;
            }
            let sj = g.s(j);
            let (v0, v1, d0, d1) = (v[j], v[j + 1], d[j], d[j + 1]);
            if v0 == T::zero() && v1 == T::zero() && d0 == T::zero() && d1 == T::zero() {
                continue;
            }
            acc += gauss_legendre8(a, b, |s| {
                let t = (s - sj) / h;
                let vv = v0 + t * (v1 - v0);
                let dv = d0 + t * (d1 - d0);
                let sigma = s - mt;
                let z = cut.zeta_s(sigma);
                let dz = cut.dzeta_s(sigma);
                (vv * z).abs().powf(p) * sigma.exp()
                    + (dv * z + vv * dz).abs().powf(p) * ((T::one() - p) * sigma).exp()
            });
        }
        total += (spec.theta * mt).exp() * acc;
    }
    Ok(total.powf(p.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted::build_cutoff;
    use std::f64::consts::E;

    fn indicator_on_unit_shell(n: usize) -> SampledFunction<f64> {
        let g = LogGrid::new(-1.0, 2.0, n).unwrap();
        SampledFunction::cell_constant(g, |s: f64| if (0.0..1.0).contains(&s) { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn indicator_norms_match_antiderivatives() {
        let u = indicator_on_unit_shell(31);
        let n = lp_theta_norm(&u, &NormSpec::new(2.0, 2.0).unwrap()).unwrap();
        assert!((n - ((E * E - 1.0) / 2.0).sqrt()).abs() < 1e-13);
        let n0 = lp_theta_norm(&u, &NormSpec::new(2.0, 0.0).unwrap()).unwrap();
        assert!((n0 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let g = LogGrid::new(-1.0, 1.0, 17).unwrap();
        let u = SampledFunction::from_fn(g, |_| 0.0).unwrap();
        let spec = NormSpec::new(3.0, 1.0).unwrap();
        assert_eq!(lp_theta_norm(&u, &spec).unwrap(), 0.0);
        assert_eq!(h1_theta_norm(&u, &spec).unwrap(), 0.0);
        assert_eq!(dyadic_norm(&u, &spec, &build_cutoff(3.0)).unwrap(), 0.0);
    }

    #[test]
    fn h1_norm_of_identity_on_unit_shell() {
        let g = LogGrid::new(0.0, 1.0, 1025).unwrap();
        let u = SampledFunction::from_fn(g, |s: f64| s.exp()).unwrap();
        let n = h1_theta_norm(&u, &NormSpec::new(2.0, 0.0).unwrap()).unwrap();
        assert!((n - (E * E - 1.0).sqrt()).abs() < 1e-6, "{n}");
    }

    #[test]
    fn invalid_exponent_rejected() {
        let u = indicator_on_unit_shell(31);
        let spec = NormSpec { p: 0.5, theta: 0.0, q: 2.0 };
        assert!(matches!(lp_theta_norm(&u, &spec), Err(LabError::InvalidSpec(_))));
    }

    #[test]
    fn sign_change_inside_cell() {
        let g = LogGrid::new(0.0, 2.0, 3).unwrap();
        let u = SampledFunction::new(g, vec![-1.0f64, 1.0, 0.0], Interp::Linear).unwrap();
        // ∫_0^1 |2s-1|^2 ds + ∫_1^2 (2-s)^2 ds = 1/3 + 1/3
        let n = lp_theta_norm(&u, &NormSpec::new(2.0, 0.0).unwrap()).unwrap();
        assert!((n * n - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn dyadic_norm_needs_enough_shifts() {
        let u = indicator_on_unit_shell(31);
        let cut = build_cutoff(2.0).with_shifts(0, 0);
        assert!(matches!(
            dyadic_norm(&u, &NormSpec::new(2.0, 0.0).unwrap(), &cut),
            Err(LabError::CoverageError(_))
        ));
    }

    #[test]
    fn single_shell_only_touches_nearby_shifts() {
        let u = indicator_on_unit_shell(61);
        let spec = NormSpec::new(2.0, 0.0).unwrap();
        let narrow = build_cutoff(2.0).with_shifts(-2, 3);
        let wide = build_cutoff(2.0).with_shifts(-40, 40);
        let a = dyadic_norm(&u, &spec, &narrow).unwrap();
        let b = dyadic_norm(&u, &spec, &wide).unwrap();
        assert_eq!(a, b);
    }
}
