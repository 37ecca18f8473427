//! Uniform grids in logarithmic coordinates `s = log x`.

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Uniform grid in `s = log x` with `n` nodes `s_j = s_min + j h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid<T> {
    s_min: T,
    s_max: T,
    n: usize,
    h: T,
}

impl<T: Real> LogGrid<T> {
    /// Grid with `n >= 3` nodes spanning `[s_min, s_max]`.
    pub fn new(s_min: T, s_max: T, n: usize) -> Result<Self> {
        if !(s_min.is_finite() && s_max.is_finite()) || s_min >= s_max {
            return Err(LabError::InvalidGrid(format!(
                "need finite s_min < s_max, got [{s_min}, {s_max}]"
            )));
        }
        if n < 3 {
            return Err(LabError::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        let h = (s_max - s_min) / T::from_usize_lossy(n - 1);
        Ok(Self { s_min, s_max, n, h })
    }

    /// Grid starting at `s_min` with spacing `h` and `n` nodes.
    pub fn with_spacing(s_min: T, h: T, n: usize) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(LabError::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if n < 3 {
            return Err(LabError::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        let s_max = s_min + h * T::from_usize_lossy(n - 1);
        Ok(Self { s_min, s_max, n, h })
    }

    /// Grid whose node set contains every integer multiple of `h` in
    /// `[s_lo, s_hi]`, extended outward to the nearest multiples.
    pub fn aligned(s_lo: T, s_hi: T, h: T) -> Result<Self> {
        if !(h > T::zero()) || s_lo >= s_hi {
            return Err(LabError::InvalidGrid(format!(
                "aligned grid needs h>0 and s_lo<s_hi, got h={h}, [{s_lo}, {s_hi}]"
            )));
        }
        let k_lo = (s_lo / h).floor();
        let k_hi = (s_hi / h).ceil();
        let n = (k_hi - k_lo).to_usize().unwrap_or(0) + 1;
        Self::with_spacing(k_lo * h, h, n)
    }

    pub fn s_min(&self) -> T {
        self.s_min
    }

    pub fn s_max(&self) -> T {
        self.s_max
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn cells(&self) -> usize {
        self.n - 1
    }

    #[inline]
    pub fn s(&self, j: usize) -> T {
        if j + 1 == self.n {
            self.s_max
        } else {
            self.s_min + self.h * T::from_usize_lossy(j)
        }
    }

    #[inline]
    pub fn x(&self, j: usize) -> T {
        self.s(j).exp()
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|j| self.s(j)).collect()
    }

    /// Index of the cell containing `s`, clamped to the valid range.
    #[inline]
    pub fn cell_index(&self, s: T) -> usize {
        let k = ((s - self.s_min) / self.h).floor();
        if k <= T::zero() {
            0
        } else {
            k.to_usize().unwrap_or(usize::MAX).min(self.n - 2)
        }
    }

    /// Index of the node nearest to `s`, if it lies within `tol * h`.
    pub fn node_index(&self, s: T, tol: T) -> Option<usize> {
        let k = ((s - self.s_min) / self.h).round();
        if k < T::zero() {
            return None;
        }
        let j = k.to_usize()?;
        if j >= self.n {
            return None;
        }
        ((self.s(j) - s).abs() <= tol * self.h).then_some(j)
    }

    pub fn contains(&self, s: T) -> bool {
        s >= self.s_min && s <= self.s_max
    }

    /// Same span, `2(n-1)+1` nodes.
    pub fn refined(&self) -> Self {
        Self::new(self.s_min, self.s_max, 2 * (self.n - 1) + 1).expect("refinement of a valid grid")
    }

    /// Grid translated by `ds`.
    pub fn shifted(&self, ds: T) -> Self {
        Self {
            s_min: self.s_min + ds,
            s_max: self.s_max + ds,
            ..*self
        }
    }

    /// Short identifier used to tag reports.
    pub fn id(&self) -> String {
        format!(
            "loggrid[{:.6},{:.6}]n{}",
            self.s_min.to_f64_lossy(),
            self.s_max.to_f64_lossy(),
            self.n
        )
    }

    pub(crate) fn require_solver_size(&self) -> Result<()> {
        if self.n < 16 {
            return Err(LabError::InvalidGrid(format!(
                "solvers need at least 16 nodes, got {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Grid uniform in `log x` over `[x_min, x_max]` with `n` nodes.
pub fn build_log_grid<T: Real>(x_min: T, x_max: T, n: usize) -> Result<LogGrid<T>> {
    if !(x_min > T::zero()) || !(x_max > x_min) || !x_max.is_finite() {
        return Err(LabError::InvalidGrid(format!(
            "need 0 < x_min < x_max, got x_min={x_min}, x_max={x_max}"
        )));
    }
    LogGrid::new(x_min.ln(), x_max.ln(), n)
}

/// Uniform time grid `t_k = k dt`, `k = 0..=m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    t_end: T,
    m: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_end: T, m: usize) -> Result<Self> {
        if !(t_end > T::zero()) || !t_end.is_finite() {
            return Err(LabError::InvalidGrid(format!("t_end must be positive, got {t_end}")));
        }
        if m < 4 {
            return Err(LabError::InvalidGrid(format!("need at least 4 time steps, got {m}")));
        }
        Ok(Self { t_end, m })
    }

    pub fn t_end(&self) -> T {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> T {
        self.t_end / T::from_usize_lossy(self.m)
    }

    pub fn t(&self, k: usize) -> T {
        if k == self.m {
            self.t_end
        } else {
            self.dt() * T::from_usize_lossy(k)
        }
    }

    pub fn refined(&self) -> Self {
        Self { t_end: self.t_end, m: 2 * self.m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_node_grid_hits_integers() {
        let g = build_log_grid((-1.0f64).exp(), 1.0f64.exp(), 3).unwrap();
        let s = g.nodes();
        assert!((s[0] + 1.0).abs() < 1e-15);
        assert!(s[1].abs() < 1e-15);
        assert!((s[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(matches!(build_log_grid(1.0, 1.0, 32), Err(LabError::InvalidGrid(_))));
        assert!(matches!(build_log_grid(0.0, 1.0, 32), Err(LabError::InvalidGrid(_))));
    }

    #[test]
    fn spacing_of_wide_grid() {
        let g = build_log_grid(1e-4f64, 1e4, 1025).unwrap();
        let expect = 8.0 * 10f64.ln() / 1024.0;
        assert!((g.h() - expect).abs() < 1e-15);
    }

    #[test]
    fn aligned_grid_contains_multiples() {
        let h = 2f64.ln() / 64.0;
        let g = LogGrid::aligned(-3.0, 4.0, h).unwrap();
        assert!(g.node_index(0.0, 1e-9).is_some());
        assert!(g.node_index(2f64.ln(), 1e-9).is_some());
        assert!(g.s_min() <= -3.0 && g.s_max() >= 4.0);
    }

    #[test]
    fn time_grid_rejects_few_steps() {
        assert!(TimeGrid::new(1.0f64, 3).is_err());
        let tg = TimeGrid::new(2.0f64, 8).unwrap();
        assert_eq!(tg.t(8), 2.0);
        assert!((tg.dt() - 0.25).abs() < 1e-15);
    }
}
