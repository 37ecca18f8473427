use crate::error::{LabError, Result};
use crate::scalar::{c, Real};

/// Weight on the time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWeight<T> {
    One,
    /// `|t|^a` with `a > -1`.
    Power(T),
}

impl<T: Real> TimeWeight<T> {
    pub fn power(a: T) -> Result<Self> {
        if !(a > -T::one()) || !a.is_finite() {
            return Err(LabError::InvalidSpec(format!("power weight needs a > -1, got {a}")));
        }
        Ok(Self::Power(a))
    }

    pub fn exponent(&self) -> T {
        match self {
            Self::One => T::zero(),
            Self::Power(a) => *a,
        }
    }

    pub fn eval(&self, t: T) -> T {
        match self {
            Self::One => T::one(),
            Self::Power(a) => t.abs().powf(*a),
        }
    }

    /// `ω((lo, hi))`.
    pub fn measure(&self, lo: T, hi: T) -> T {
        if hi <= lo {
            return T::zero();
        }
        match self {
            Self::One => hi - lo,
            Self::Power(a) => {
                let e = *a + T::one();
                // signed antiderivative of |t|^a
                let prim = |t: T| t.signum() * t.abs().powf(e) / e;
                prim(hi) - prim(lo)
            }
        }
    }
}

/// Powers of two from 16 up to `resolution`.
pub fn ap_levels(resolution: usize) -> Vec<usize> {
    std::iter::successors(Some(16usize), |n| n.checked_mul(2)).take_while(|n| *n <= resolution).collect()
}

/// `avg(ω) · avg(ω^{1/(1-p)})^{p-1}` on `(lo, lo + len)` by the
/// `n`-point midpoint rule.
fn ap_quotient<T: Real>(w: &TimeWeight<T>, p: T, lo: T, len: T, n: usize) -> T {
    let step = len / T::from_usize_lossy(n);
    let dual = (T::one() - p).recip();
    let mut s1 = T::zero();
    let mut s2 = T::zero();
    for i in 0..n {
        let t = lo + step * (T::from_usize_lossy(i) + c(0.5));
        let wt = w.eval(t);
        s1 += wt;
        s2 += wt.powf(dual);
    }
    let nn = T::from_usize_lossy(n);
    (s1 / nn) * (s2 / nn).powf(p - T::one())
}

/// Lower estimate of `[ω]_{A_p}`.
///
/// Scans intervals of length `2^k`, `k = -4..=4`, with left endpoints
/// `L j / 8`, `j = -16..=8` (so some intervals start or end at 0 and
/// others straddle it). Averages use the midpoint rule with `N` points for
/// every power of two `N` in `16..=resolution`; the running maximum makes
/// the estimate nondecreasing in `resolution`. For `ω ≡ 1` the result is
/// exactly 1.
pub fn ap_constant_estimate<T: Real>(w: &TimeWeight<T>, p: T, resolution: usize) -> Result<T> {
    if !(p > T::one()) {
        return Err(LabError::InvalidSpec(format!("p must exceed 1, got {p}")));
    }
    if resolution < 16 {
        return Err(LabError::InvalidSpec(format!("resolution must be at least 16, got {resolution}")));
    }
    if let TimeWeight::Power(a) = w {
        TimeWeight::power(*a)?;
    }
    let mut best = T::zero();
    for n in ap_levels(resolution) {
        for k in -4i32..=4 {
            let len = c::<T>(2f64.powi(k));
            for j in -16i32..=8 {
                let lo = len * c(f64::from(j) / 8.0);
                let q = ap_quotient(w, p, lo, len, n);
                if q > best {
                    best = q;
                }
            }
        }
    }
    Ok(best)
}
