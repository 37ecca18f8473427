use rayon::prelude::*;

use super::cover::{critical_radius, density, Cylinder};
use super::interval_set::IntervalSet;
use crate::error::{LabError, Result};
use crate::scalar::{c, Real};

/// Smallest accepted radius-ladder resolution.
pub const MIN_SCAN: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisOutcome<T> {
    pub holds: bool,
    /// `(t, R)` with `|C_R(t) ∩ E| ≥ γ|C_R(t)|` but `Ĉ_R(t) ⊄ F`.
    pub witness: Option<(T, T)>,
    /// Number of `(t, R)` pairs examined.
    pub scanned: usize,
}

/// Scans for `(t, R)`, `t ≤ T`, with `|C_R(t) ∩ E| ≥ γ|C_R(t)|` and
/// `Ĉ_R(t) ⊄ F`.
///
/// Centers are the interval ends of `E` and `F`, the midpoints between
/// consecutive ends, and `T` itself when finite. Radii are a geometric
/// ladder of `scan` values up to `|E| / 2γ` (no larger cylinder can reach
/// density `γ`), the distances and half distances from each center to the
/// ends, and the critical radius at each center. Among several violations
/// the witness is the one with `2R` closest to `|E|` on a log scale, then
/// the smallest `t`, then the smallest `R`.
///
/// `Ĉ_R(t) = (t - R, min(t + R, T))` is compared with `F` as an open
/// interval.
///
/// Errors: [`LabError::InvalidSpec`] for `γ ∉ (0, 1)` or
/// `scan <` [`MIN_SCAN`].
pub fn hypothesis_check<T: Real>(
    e: &IntervalSet<T>,
    f: &IntervalSet<T>,
    gamma: T,
    clip: T,
    scan: usize,
) -> Result<HypothesisOutcome<T>> {
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(LabError::InvalidSpec(format!("density level must lie in (0, 1), got {gamma}")));
    }
    if scan < MIN_SCAN {
        return Err(LabError::InvalidSpec(format!("scan resolution must be at least {MIN_SCAN}, got {scan}")));
    }
    if e.is_empty() {
        return Ok(HypothesisOutcome { holds: true, witness: None, scanned: 0 });
    }
    // E ⊄ F: small cylinders inside E ∖ F have density 1
    let outside = e.minus(f.intervals()).restricted(-T::infinity(), clip);
    if let Some(&(a, b)) = outside.intervals().first() {
        let half: T = c(0.5);
        return Ok(HypothesisOutcome { holds: false, witness: Some(((a + b) * half, (b - a) * c(0.25))), scanned: 0 });
    }

    let mut ends: Vec<T> = e.endpoints();
    ends.extend(f.endpoints());
    if clip.is_finite() {
        ends.push(clip);
    }
    ends.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ends.dedup();
    let half: T = c(0.5);
    let mut centers: Vec<T> = ends.clone();
    centers.extend(ends.windows(2).map(|w| (w[0] + w[1]) * half));
    centers.retain(|t| *t <= clip);

    let r_max = e.measure() / (gamma + gamma);
    let min_gap = ends
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > T::zero())
        .fold(e.measure(), T::min);
    let r_min = min_gap * c(0.25);
    let ratio = (r_max / r_min).ln() / T::from_usize_lossy(scan - 1);
    let ladder: Vec<T> = (0..scan).map(|k| r_min * (ratio * T::from_usize_lossy(k)).exp()).collect();
    let slack = T::one() + c(1e-12);

    let scale = e.measure();
    let key = |r: T| ((r + r) / scale).log2().abs();
    let results: Vec<(usize, Option<(T, T)>)> = centers
        .par_iter()
        .map(|&t| {
            let mut radii = ladder.clone();
            for &x in &ends {
                let d = (x - t).abs();
                if d > T::zero() {
                    radii.push(d);
                    radii.push(d * half);
                }
            }
            if let Ok(r) = critical_radius(e, t, gamma) {
                radii.push(r);
            }
            radii.retain(|r| *r > T::zero() && *r <= r_max * slack);
            let mut best: Option<(T, T)> = None;
            for &r in &radii {
                let dense = density(e, t, r).is_ok_and(|d| d >= gamma);
                if !dense {
                    continue;
                }
                let (lo, hi) = Cylinder::new(t, r).clipped_at(clip).clipped();
                if f.contains_interval(lo, hi) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((_, br)) => {
                        let (k1, k0) = (key(r), key(br));
                        k1 < k0 || (k1 == k0 && r < br)
                    }
                };
                if better {
                    best = Some((t, r));
                }
            }
            (radii.len(), best)
        })
        .collect();
    let scanned = results.iter().map(|r| r.0).sum();
    let witness = results.into_iter().filter_map(|r| r.1).min_by(|a, b| {
        let (ka, kb) = (key(a.1), key(b.1));
        ka.partial_cmp(&kb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(HypothesisOutcome { holds: witness.is_none(), witness, scanned })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wider_f_satisfies_hypothesis() {
        let e = IntervalSet::single(0.0f64, 1.0).unwrap();
        let f = IntervalSet::single(-1.0, 2.0).unwrap();
        let h = hypothesis_check(&e, &f, 0.5, f64::INFINITY, 256).unwrap();
        assert!(h.holds && h.witness.is_none() && h.scanned > 0);
    }

    #[test]
    fn equal_sets_fail_with_witness() {
        let e = IntervalSet::single(0.0f64, 1.0).unwrap();
        let h = hypothesis_check(&e, &e, 0.5, f64::INFINITY, 256).unwrap();
        assert!(!h.holds);
        assert_eq!(h.witness, Some((0.0, 0.5)));
    }

    #[test]
    fn empty_set_holds_vacuously() {
        let f = IntervalSet::single(0.0f64, 1.0).unwrap();
        assert!(hypothesis_check(&IntervalSet::empty(), &f, 0.5, f64::INFINITY, 256).unwrap().holds);
    }

    #[test]
    fn e_not_inside_f_fails() {
        let e = IntervalSet::single(0.0f64, 2.0).unwrap();
        let f = IntervalSet::single(-10.0, 1.0).unwrap();
        let h = hypothesis_check(&e, &f, 0.5, f64::INFINITY, 256).unwrap();
        assert_eq!(h.witness, Some((1.5, 0.25)));
    }

    #[test]
    fn clipping_ignores_the_future() {
        // dense cylinders around E reach past 2, but only up to T = 1 counts
        let e = IntervalSet::single(0.0f64, 1.0).unwrap();
        let f = IntervalSet::single(-1.0, 1.0).unwrap();
        assert!(hypothesis_check(&e, &f, 0.5, 1.0, 256).unwrap().holds);
        assert!(!hypothesis_check(&e, &f, 0.5, f64::INFINITY, 256).unwrap().holds);
    }

    #[test]
    fn bad_inputs() {
        let e = IntervalSet::single(0.0f64, 1.0).unwrap();
        assert!(hypothesis_check(&e, &e, 0.5, f64::INFINITY, 10).is_err());
        assert!(hypothesis_check(&e, &e, 1.0, f64::INFINITY, 256).is_err());
    }
}
