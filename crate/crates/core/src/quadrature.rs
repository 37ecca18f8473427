//! Quadrature rules: composite Simpson on uniform samples, fixed
//! Gauss–Legendre panels, and adaptive Gauss–Kronrod.

use crate::error::{LabError, Result};
use crate::scalar::{c, Real};

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const K15_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss 7-point weights at K15_X[1], K15_X[3], K15_X[5], K15_X[7].
const G7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
#[inline]
pub fn gauss_legendre8<T: Real>(a: T, b: T, f: impl Fn(T) -> T) -> T {
    let mid = (a + b) * c(0.5);
    let half = (b - a) * c(0.5);
    let mut acc = T::zero();
    for k in 0..4 {
        let dx = half * c(GL8_X[k]);
        acc += c::<T>(GL8_W[k]) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Node `q` (0..8) and weight of the eight-point rule on `[-1, 1]`.
#[inline]
pub fn gl8_node<T: Real>(q: usize) -> (T, T) {
    let k = q % 4;
    let x = c::<T>(GL8_X[k]);
    (if q < 4 { -x } else { x }, c(GL8_W[k]))
}

/// Gauss–Legendre on `[a, b]` split into panels no wider than `max_width`.
pub fn gauss_legendre_panels<T: Real>(a: T, b: T, max_width: T, f: impl Fn(T) -> T) -> T {
    if b <= a {
        return T::zero();
    }
    let panels = ((b - a) / max_width).ceil().to_usize().unwrap_or(1).max(1);
    let w = (b - a) / T::from_usize_lossy(panels);
    (0..panels)
        .map(|k| {
            let lo = a + w * T::from_usize_lossy(k);
            let hi = if k + 1 == panels { b } else { lo + w };
            gauss_legendre8(lo, hi, &f)
        })
        .sum()
}

/// Composite Simpson rule on uniformly spaced samples.
///
/// An odd number of intervals closes with the 3/8 rule on the last three.
pub fn simpson<T: Real>(values: &[T], h: T) -> T {
    let n = values.len();
    match n {
        0 | 1 => T::zero(),
        2 => (values[0] + values[1]) * h * c(0.5),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, false)
            } else if intervals >= 3 {
                (n - 4, true)
            } else {
                unreachable!()
            };
            let mut acc = T::zero();
            if simpson_end > 0 {
                acc += values[0] + values[simpson_end];
                for (j, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                    acc += if j % 2 == 1 { c::<T>(4.0) * *v } else { c::<T>(2.0) * *v };
                }
                acc *= h / c(3.0);
            }
            if tail {
                let k = simpson_end;
                acc += c::<T>(3.0) * h / c(8.0)
                    * (values[k] + c::<T>(3.0) * values[k + 1] + c::<T>(3.0) * values[k + 2] + values[k + 3]);
            }
            acc
        }
    }
}

fn gauss_kronrod15<T: Real>(a: T, b: T, f: &impl Fn(T) -> T) -> (T, T) {
    let mid = (a + b) * c(0.5);
    let half = (b - a) * c(0.5);
    let fc = f(mid);
    let mut kron = fc * c(K15_W[7]);
    let mut gauss = fc * c(G7_W[3]);
    for k in 0..7 {
        let dx = half * c(K15_X[k]);
        let pair = f(mid - dx) + f(mid + dx);
        kron += pair * c(K15_W[k]);
        if k % 2 == 1 {
            gauss += pair * c(G7_W[k / 2]);
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Tolerances for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveTol<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for AdaptiveTol<T> {
    fn default() -> Self {
        Self { abs: c(1e-14), rel: c(1e-12), max_intervals: 4000 }
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on `[a, b]`.
///
/// Returns the integral and the summed error estimate.
pub fn integrate_adaptive<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    tol: AdaptiveTol<T>,
) -> Result<(T, T)> {
    if a == b {
        return Ok((T::zero(), T::zero()));
    }
    let mut parts = vec![{
        let (v, e) = gauss_kronrod15(a, b, &f);
        (a, b, v, e)
    }];
    loop {
        let total: T = parts.iter().map(|p| p.2).sum();
        let err: T = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(LabError::QuadratureError(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok((total, err));
        }
        if parts.len() >= tol.max_intervals {
            return Err(LabError::QuadratureError(format!(
                "{} subintervals on [{a}, {b}], estimate {total}, error {err}",
                parts.len()
            )));
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (k, p)| if p.3 > acc.1 { (k, p.3) } else { acc });
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = (lo + hi) * c(0.5);
        if !(mid > lo && mid < hi) {
            // interval at machine resolution: accept what we have
            return Ok((total, err));
        }
        let (v1, e1) = gauss_kronrod15(lo, mid, &f);
        let (v2, e2) = gauss_kronrod15(mid, hi, &f);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Adaptive quadrature over consecutive segments between sorted `points`.
pub fn integrate_with_breaks<T: Real>(
    f: impl Fn(T) -> T,
    points: &[T],
    tol: AdaptiveTol<T>,
) -> Result<(T, T)> {
    let mut total = T::zero();
    let mut err = T::zero();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e) = integrate_adaptive(&f, w[0], w[1], tol)?;
            total += v;
            err += e;
        }
    }
    Ok((total, err))
}

/// `∫_0^∞ e^{-kappa t} |c_slow + c_fast e^{-delta t}|^p dt` for `delta >= 0`.
///
/// Returns `+inf` when the integral diverges.
///
/// This is the shape of every power-law tail of the closed-form Euler
/// solutions after factoring out the value at the truncation point.
pub fn two_exponential_tail<T: Real>(c_slow: T, c_fast: T, kappa: T, delta: T, p: T) -> Result<T> {
    if c_slow == T::zero() {
        if c_fast == T::zero() {
            return Ok(T::zero());
        }
        let k = kappa + p * delta;
        return Ok(if k > T::zero() { c_fast.abs().powf(p) / k } else { T::infinity() });
    }
    if !(kappa > T::zero()) {
        return Ok(T::infinity());
    }
    if c_fast == T::zero() || delta == T::zero() {
        return Ok((c_slow + c_fast).abs().powf(p) / kappa);
    }
    let g = |t: T| (-kappa * t).exp() * (c_slow + c_fast * (-delta * t).exp()).abs().powf(p);
    // the fast part is negligible after ~40/delta; the slow part after ~40/kappa
    let t_fast = (c::<T>(40.0) / delta).min(c::<T>(40.0) / kappa);
    let t_end = c::<T>(40.0) / kappa;
    let mut points = vec![T::zero()];
    // sign change of the inner expression, if any
    let ratio = -c_slow / c_fast;
    if ratio > T::zero() && ratio < T::one() {
        let t0 = -ratio.ln() / delta;
        if t0 > T::zero() && t0 < t_end {
            points.push(t0);
        }
    }
    points.push(t_fast);
    let mut edge = t_fast;
    while edge < t_end {
        edge = (edge * c(4.0)).min(t_end);
        points.push(edge);
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    let (v, _) = integrate_with_breaks(g, &points, AdaptiveTol { abs: c(0.0), rel: c(1e-12), max_intervals: 6000 })?;
    Ok(v)
}
