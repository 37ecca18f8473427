use rayon::prelude::*;

use super::interval_set::IntervalSet;
use crate::error::{LabError, Result};
use crate::scalar::{c, Real};

/// Dilation factor of the covering step.
pub const DILATION: f64 = 5.0;
/// Radii below `RADIUS_FLOOR · |E|` are discarded.
pub const RADIUS_FLOOR: f64 = 1e-9;
/// Target uncovered fraction `|E ∖ ∪ C_{5R_k}| / |E|`.
pub const VITALI_TOL: f64 = 1e-6;
/// Deepest dyadic refinement of the candidate centers.
pub const MAX_LEVEL: u32 = 12;

/// `C_R(t) = (t - R, t + R)`, optionally clipped to `{s ≤ T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder<T> {
    pub center: T,
    pub radius: T,
    /// `+∞` when unclipped.
    pub clip: T,
}

impl<T: Real> Cylinder<T> {
    pub fn new(center: T, radius: T) -> Self {
        Self { center, radius, clip: T::infinity() }
    }

    pub fn clipped_at(self, clip: T) -> Self {
        Self { clip, ..self }
    }

    pub fn interval(&self) -> (T, T) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// `Ĉ_R(t)`, as an open interval.
    pub fn clipped(&self) -> (T, T) {
        (self.center - self.radius, (self.center + self.radius).min(self.clip))
    }

    pub fn dilated(&self, k: T) -> Self {
        Self { radius: self.radius * k, ..*self }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        (self.center - other.center).abs() < self.radius + other.radius
    }
}

/// `φ_t(r) = |E ∩ C_r(t)| / |C_r(t)|`.
///
/// Errors: [`LabError::DomainError`] unless `r > 0` is finite.
pub fn density<T: Real>(e: &IntervalSet<T>, t: T, r: T) -> Result<T> {
    if !(r > T::zero() && r.is_finite()) {
        return Err(LabError::DomainError(format!("radius must be positive and finite, got {r}")));
    }
    Ok(e.intersection_length(t - r, t + r) / (r + r))
}

/// `R(t) = sup{r : φ_t(r) = γ}`.
///
/// `r ↦ |E ∩ C_r(t)|` is piecewise linear with breaks at the distances
/// from `t` to the interval ends, so the largest crossing is found exactly
/// by walking the pieces from the outside in.
///
/// Errors: [`LabError::NoCriticalRadius`] when `φ_t < γ` for all `r`,
/// [`LabError::InvalidSpec`] for `γ ∉ (0, 1)`.
pub fn critical_radius<T: Real>(e: &IntervalSet<T>, t: T, gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let none = || LabError::NoCriticalRadius { t: t.to_f64_lossy(), gamma: gamma.to_f64_lossy() };
    if e.is_empty() {
        return Err(none());
    }
    let mut rs: Vec<T> = e.endpoints().into_iter().map(|x| (x - t).abs()).filter(|r| *r > T::zero()).collect();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    rs.dedup();
    let two_g = gamma + gamma;
    let g = |r: T| e.intersection_length(t - r, t + r);
    let top = *rs.last().ok_or_else(none)?;
    let outer = e.measure() / two_g;
    if outer >= top {
        return Ok(outer);
    }
    let mut hi = top;
    let mut h_hi = g(hi) - two_g * hi;
    for k in (0..rs.len()).rev() {
        if h_hi >= T::zero() {
            return Ok(hi);
        }
        if k == 0 {
            break;
        }
        let lo = rs[k - 1];
        let h_lo = g(lo) - two_g * lo;
        if h_lo >= T::zero() {
            return Ok(lo + h_lo / (h_lo - h_hi) * (hi - lo));
        }
        hi = lo;
        h_hi = h_lo;
    }
    Err(none())
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma > T::zero() && gamma < T::one() {
        Ok(())
    } else {
        Err(LabError::InvalidSpec(format!("density level must lie in (0, 1), got {gamma}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSelection<T> {
    /// Pairwise disjoint cylinders in selection order.
    pub cylinders: Vec<Cylinder<T>>,
    pub gamma: T,
    pub dilation: T,
    /// Largest remaining critical radius at each selection step.
    pub max_remaining: Vec<T>,
    /// Dyadic level of the candidate centers that was accepted.
    pub level: u32,
    pub candidates: usize,
    /// `|E ∖ ∪ C_{5R_k}|`.
    pub residual: T,
}

impl<T: Real> CoverSelection<T> {
    /// The dilated cylinders as intervals.
    pub fn dilated_cover(&self) -> Vec<(T, T)> {
        self.cylinders.iter().map(|cy| cy.dilated(self.dilation).interval()).collect()
    }

    pub fn is_disjoint(&self) -> bool {
        self.cylinders
            .iter()
            .enumerate()
            .all(|(i, a)| self.cylinders[i + 1..].iter().all(|b| !a.intersects(b)))
    }
}

/// Dyadic points strictly inside each interval of `e`.
fn candidate_centers<T: Real>(e: &IntervalSet<T>, level: u32) -> Vec<T> {
    let n = 1usize << level;
    let inv = T::from_usize_lossy(n).recip();
    e.intervals()
        .iter()
        .flat_map(|&(a, b)| (1..n).map(move |k| a + (b - a) * T::from_usize_lossy(k) * inv))
        .collect()
}

fn greedy<T: Real>(mut cands: Vec<Cylinder<T>>) -> (Vec<Cylinder<T>>, Vec<T>) {
    cands.sort_by(|a, b| {
        b.radius
            .partial_cmp(&a.radius)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.center.partial_cmp(&b.center).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut chosen: Vec<Cylinder<T>> = Vec::new();
    let mut maxima = Vec::new();
    for cand in cands {
        if chosen.iter().all(|s| !s.intersects(&cand)) {
            // candidates arrive by decreasing radius, so this one is the
            // largest among those still disjoint from the selection
            maxima.push(cand.radius);
            chosen.push(cand);
        }
    }
    (chosen, maxima)
}

/// Greedy disjoint family of critical cylinders whose 5-fold dilations
/// cover `E` up to [`VITALI_TOL`]`·|E|`.
///
/// Candidate centers are the dyadic points of each interval of `E`,
/// refined until the uncovered measure is small enough; at each step the
/// largest critical cylinder disjoint from those already chosen is taken.
///
/// Errors: [`LabError::InvalidSpec`] for `γ ∉ (0, 1)`,
/// [`LabError::CoverageShortfall`] if the deepest level still leaves too
/// much uncovered.
pub fn select_cover<T: Real>(e: &IntervalSet<T>, gamma: T) -> Result<CoverSelection<T>> {
    check_gamma(gamma)?;
    let dilation: T = c(DILATION);
    if e.is_empty() {
        return Ok(CoverSelection {
            cylinders: Vec::new(),
            gamma,
            dilation,
            max_remaining: Vec::new(),
            level: 0,
            candidates: 0,
            residual: T::zero(),
        });
    }
    let floor = e.measure() * c(RADIUS_FLOOR);
    let target = e.measure() * c(VITALI_TOL);
    let mut residual = e.measure();
    for level in 1..=MAX_LEVEL {
        let centers = candidate_centers(e, level);
        let cands: Vec<Cylinder<T>> = centers
            .par_iter()
            .filter_map(|&t| critical_radius(e, t, gamma).ok().map(|r| Cylinder::new(t, r)))
            .filter(|cy| cy.radius >= floor)
            .collect();
        let (cylinders, max_remaining) = greedy(cands);
        let sel = CoverSelection {
            cylinders,
            gamma,
            dilation,
            max_remaining,
            level,
            candidates: centers.len(),
            residual: T::zero(),
        };
        residual = e.minus(&sel.dilated_cover()).measure();
        if residual < target {
            return Ok(CoverSelection { residual, ..sel });
        }
    }
    Err(LabError::CoverageShortfall { residual: residual.to_f64_lossy() })
}
