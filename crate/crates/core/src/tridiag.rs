//! Tridiagonal systems.

use crate::scalar::{c, Real};

/// Tridiagonal matrix stored by diagonals.
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

/// Pivot breakdown during elimination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub row: usize,
}

impl<T: Real> Tridiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        Self { lower: vec![T::zero(); n], diag: vec![T::zero(); n], upper: vec![T::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// `self + k * other`, entrywise.
    pub fn axpy(&self, k: T, other: &Self) -> Self {
        let zip = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x + k * *y).collect();
        Self {
            lower: zip(&self.lower, &other.lower),
            diag: zip(&self.diag, &other.diag),
            upper: zip(&self.upper, &other.upper),
        }
    }

    /// Thomas algorithm. A pivot smaller than `1e-13` times the row scale
    /// is reported as singular.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>, SingularPivot> {
        let n = self.len();
        assert_eq!(rhs.len(), n, "right-hand side length");
        if n == 0 {
            return Ok(Vec::new());
        }
        let tiny = c::<T>(1e-13);
        let scale = |i: usize| self.lower[i].abs() + self.diag[i].abs() + self.upper[i].abs();
        let mut cp = vec![T::zero(); n];
        let mut dp = vec![T::zero(); n];
        let mut piv = self.diag[0];
        if piv.abs() <= tiny * scale(0) || !piv.is_finite() {
            return Err(SingularPivot { row: 0 });
        }
        cp[0] = self.upper[0] / piv;
        dp[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - self.lower[i] * cp[i - 1];
            if piv.abs() <= tiny * scale(i) || !piv.is_finite() {
                return Err(SingularPivot { row: i });
            }
            cp[i] = if i + 1 < n { self.upper[i] / piv } else { T::zero() };
            dp[i] = (rhs[i] - self.lower[i] * dp[i - 1]) / piv;
        }
        let mut x = dp;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= cp[i] * next;
        }
        Ok(x)
    }
}
