use crate::scalar::{c, Real};

const CHECK_POINTS: usize = 10_000;
const MARGIN: f64 = 0.1;

fn bump<T: Real>(t: T) -> T {
    let q = T::one() - t * t;
    if q <= T::zero() {
        T::zero()
    } else {
        (-q.recip()).exp()
    }
}

fn bump_derivative<T: Real>(t: T) -> T {
    let q = T::one() - t * t;
    if q <= T::zero() {
        T::zero()
    } else {
        (-q.recip()).exp() * (c::<T>(-2.0) * t / (q * q))
    }
}

/// Smooth cutoff `ζ(x) = A ψ(log x / w)` with `ψ(t) = exp(-1/(1-t²))`,
/// together with the range of integer shifts used by the localized norm.
///
/// The amplitude is chosen so that `Σ_n ζ^p(e^{s-n}) ≥ 1 + margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFamily<T> {
    amplitude: T,
    half_width: T,
    p: T,
    margin: T,
    shifts: (i64, i64),
}

/// Cutoff family for exponent `p > 1` with unit half-width in `log x`
/// and shifts `-64..=64`.
pub fn build_cutoff<T: Real>(p: T) -> CutoffFamily<T> {
    let half_width = T::one();
    // Σ_n ψ^p(s - n) is 1-periodic; its minimum over a period fixes A.
    let min_sum = (0..CHECK_POINTS)
        .map(|k| {
            let s = T::from_usize_lossy(k) / T::from_usize_lossy(CHECK_POINTS);
            bump(s).powf(p) + bump(s - T::one()).powf(p)
        })
        .fold(T::infinity(), T::min);
    let target = T::one() + c(MARGIN);
    CutoffFamily { amplitude: (target / min_sum).powf(p.recip()), half_width, p, margin: c(MARGIN), shifts: (-64, 64) }
}

impl<T: Real> CutoffFamily<T> {
    pub fn with_shifts(self, lo: i64, hi: i64) -> Self {
        Self { shifts: (lo, hi), ..self }
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn margin(&self) -> T {
        self.margin
    }

    pub fn shifts(&self) -> (i64, i64) {
        self.shifts
    }

    /// Support of `ζ` in `x`.
    pub fn support_x(&self) -> (T, T) {
        ((-self.half_width).exp(), self.half_width.exp())
    }

    /// `ζ(e^σ)`.
    pub fn zeta_s(&self, sigma: T) -> T {
        self.amplitude * bump(sigma / self.half_width)
    }

    /// `d/dσ ζ(e^σ)`.
    pub fn dzeta_s(&self, sigma: T) -> T {
        self.amplitude * bump_derivative(sigma / self.half_width) / self.half_width
    }

    /// `ζ(x)`; zero for `x ≤ 0` and outside the support.
    pub fn zeta(&self, x: T) -> T {
        if x > T::zero() {
            self.zeta_s(x.ln())
        } else {
            T::zero()
        }
    }

    /// `Σ_n ζ^p(e^{s-n})`.
    pub fn partition_sum(&self, s: T) -> T {
        let lo = (s - self.half_width).floor().to_i64().unwrap_or(0);
        let hi = (s + self.half_width).ceil().to_i64().unwrap_or(0);
        (lo..=hi)
            .map(|n| self.zeta_s(s - T::from_i64(n).expect("shift")).powf(self.p))
            .sum()
    }

    /// Minimum of [`Self::partition_sum`] over a uniform check grid on one period.
    pub fn partition_minimum(&self) -> T {
        (0..CHECK_POINTS)
            .map(|k| self.partition_sum(T::from_usize_lossy(k) / T::from_usize_lossy(CHECK_POINTS)))
            .fold(T::infinity(), T::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_condition_holds_with_margin() {
        for p in [1.5f64, 2.0, 4.0] {
            let cut = build_cutoff(p);
            let m = cut.partition_minimum();
            assert!(m >= 1.0, "p={p}: {m}");
            assert!((m - 1.1).abs() < 1e-9, "p={p}: {m}");
        }
    }

    #[test]
    fn vanishes_outside_support() {
        let cut = build_cutoff(2.0f64);
        let (a, b) = cut.support_x();
        assert_eq!(cut.zeta(a * 0.999), 0.0);
        assert_eq!(cut.zeta(b * 1.001), 0.0);
        assert_eq!(cut.zeta(-1.0), 0.0);
        assert!(cut.zeta(1.0) > 0.0);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let cut = build_cutoff(3.0f64);
        for s in [-0.7, -0.2, 0.1, 0.55] {
            let h = 1e-6;
            let fd = (cut.zeta_s(s + h) - cut.zeta_s(s - h)) / (2.0 * h);
            assert!((fd - cut.dzeta_s(s)).abs() < 1e-7);
        }
    }
}
