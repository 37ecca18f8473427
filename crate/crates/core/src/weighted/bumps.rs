use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SampledFunction;
use crate::error::Result;
use crate::grid::LogGrid;
use crate::scalar::{c, Real};

/// Finite sum `Σ a_k ψ((s - c_k)/w_k)` of standard bumps in `s = log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothBump<T> {
    /// `(amplitude, center, half-width)` triples.
    pub terms: Vec<(T, T, T)>,
}

impl<T: Real> SmoothBump<T> {
    pub fn single(amplitude: T, center: T, half_width: T) -> Self {
        Self { terms: vec![(amplitude, center, half_width)] }
    }

    pub fn eval(&self, s: T) -> T {
        self.terms
            .iter()
            .map(|&(a, m, w)| {
                let t = (s - m) / w;
                let q = T::one() - t * t;
                if q > T::zero() {
                    a * (-q.recip()).exp()
                } else {
                    T::zero()
                }
            })
            .sum()
    }

    pub fn derivative(&self, s: T) -> T {
        self.terms
            .iter()
            .map(|&(a, m, w)| {
                let t = (s - m) / w;
                let q = T::one() - t * t;
                if q > T::zero() {
                    a * (-q.recip()).exp() * (c::<T>(-2.0) * t / (q * q)) / w
                } else {
                    T::zero()
                }
            })
            .sum()
    }

    /// Closed `s`-interval containing the support.
    pub fn support(&self) -> (T, T) {
        self.terms.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, m, w)| {
            (lo.min(m - w), hi.max(m + w))
        })
    }

    /// Node samples with exact derivatives attached.
    pub fn sample(&self, grid: LogGrid<T>) -> Result<SampledFunction<T>> {
        SampledFunction::from_fn_with_derivative(grid, |s| self.eval(s), |s| self.derivative(s))
    }
}

/// Deterministic family of `count` random bump sums.
///
/// Each member has one to three terms with centers in `[-2, 2]`,
/// half-widths in `[0.3, 1.5]` and amplitudes in `±[0.1, 1]`, so every
/// support lies in `[-3.5, 3.5]`.
pub fn random_bump_family<T: Real>(seed: u64, count: usize) -> Vec<SmoothBump<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let terms = (0..k)
                .map(|_| {
                    let mag: f64 = rng.gen_range(0.1..1.0);
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    let center: f64 = rng.gen_range(-2.0..2.0);
                    let width: f64 = rng.gen_range(0.3..1.5);
                    (c(sign * mag), c(center), c(width))
                })
                .collect();
            SmoothBump { terms }
        })
        .collect()
}
