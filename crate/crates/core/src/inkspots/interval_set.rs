use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::scalar::{c, Real};
use crate::weighted::TimeWeight;

/// Finite union of open intervals, stored sorted with gaps between
/// consecutive members.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<T> {
    intervals: Vec<(T, T)>,
    total: T,
}

impl<T: Real> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { intervals: Vec::new(), total: T::zero() }
    }

    /// Sorts and merges overlapping or touching intervals.
    ///
    /// Errors: [`LabError::InvalidSpec`] for `a >= b` or non-finite ends.
    pub fn new(mut intervals: Vec<(T, T)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(LabError::InvalidSpec(format!("interval ({a}, {b}) is not a proper finite interval")));
            }
        }
        intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let total = merged.iter().fold(T::zero(), |s, (a, b)| s + (*b - *a));
        Ok(Self { intervals: merged, total })
    }

    pub fn single(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> T {
        self.total
    }

    /// `ω(E)`.
    pub fn weighted_measure(&self, w: &TimeWeight<T>) -> T {
        self.intervals.iter().fold(T::zero(), |s, (a, b)| s + w.measure(*a, *b))
    }

    /// `inf E` and `sup E`.
    pub fn hull(&self) -> Option<(T, T)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    /// All interval ends, sorted.
    pub fn endpoints(&self) -> Vec<T> {
        self.intervals.iter().flat_map(|(a, b)| [*a, *b]).collect()
    }

    /// `|E ∩ (lo, hi)|`.
    pub fn intersection_length(&self, lo: T, hi: T) -> T {
        if !(hi > lo) {
            return T::zero();
        }
        let start = self.intervals.partition_point(|(_, b)| *b <= lo);
        let mut total = T::zero();
        for &(a, b) in &self.intervals[start..] {
            if a >= hi {
                break;
            }
            total += b.min(hi) - a.max(lo);
        }
        total
    }

    /// Whether the open interval `(lo, hi)` lies inside the set.
    pub fn contains_interval(&self, lo: T, hi: T) -> bool {
        if !(hi > lo) {
            return true;
        }
        let k = self.intervals.partition_point(|(_, b)| *b < hi);
        self.intervals.get(k).is_some_and(|&(a, _)| a <= lo)
    }

    /// Whether `t` lies in the set.
    pub fn contains_point(&self, t: T) -> bool {
        let k = self.intervals.partition_point(|(_, b)| *b <= t);
        self.intervals.get(k).is_some_and(|&(a, _)| a < t)
    }

    /// `E ∖ (∪ cover)`.
    pub fn minus(&self, cover: &[(T, T)]) -> Self {
        let Ok(cover) = Self::new(cover.iter().copied().filter(|(a, b)| a < b).collect()) else {
            return self.clone();
        };
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            let mut cur = a;
            for &(ca, cb) in &cover.intervals {
                if cb <= cur {
                    continue;
                }
                if ca >= b {
                    break;
                }
                if ca > cur {
                    out.push((cur, ca));
                }
                cur = cur.max(cb);
                if cur >= b {
                    break;
                }
            }
            if cur < b {
                out.push((cur, b));
            }
        }
        Self::new(out).unwrap_or_else(|_| Self::empty())
    }

    /// `E ∩ (lo, hi)` as a set.
    pub fn restricted(&self, lo: T, hi: T) -> Self {
        let pieces = self
            .intervals
            .iter()
            .map(|&(a, b)| (a.max(lo), b.min(hi)))
            .filter(|(a, b)| a < b)
            .collect();
        Self::new(pieces).unwrap_or_else(|_| Self::empty())
    }

    /// Whether every member lies inside `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals.iter().all(|&(a, b)| other.contains_interval(a, b))
    }
}

/// Deterministic random interval set: `count` intervals with left ends in
/// `[lo, hi)` and lengths in `[min_len, max_len]`, merged where they meet.
pub fn random_interval_set<T: Real>(seed: u64, count: usize, lo: f64, hi: f64, min_len: f64, max_len: f64) -> IntervalSet<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = (0..count)
        .map(|_| {
            let a: f64 = rng.gen_range(lo..hi);
            let len: f64 = rng.gen_range(min_len..=max_len);
            (c(a), c(a + len))
        })
        .collect();
    IntervalSet::new(pieces).unwrap_or_else(|_| IntervalSet::empty())
}
