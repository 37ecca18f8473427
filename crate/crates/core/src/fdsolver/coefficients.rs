use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Which single variable the coefficients depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    /// Functions of `s = log x`.
    Space,
    /// Functions of `t`.
    Time,
}

/// Piecewise-constant function on the line: `values[k]` on
/// `[breaks[k-1], breaks[k])`, with `values[0]` to the left of the first
/// break and the last value to the right of the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant<T> {
    breaks: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PiecewiseConstant<T> {
    pub fn constant(v: T) -> Self {
        Self { breaks: Vec::new(), values: vec![v] }
    }

    pub fn new(breaks: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(LabError::InvalidCoefficients(format!(
                "{} breaks need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(LabError::InvalidCoefficients("breaks must be finite and increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidCoefficients("non-finite coefficient value".into()));
        }
        Ok(Self { breaks, values })
    }

    /// Alternates `lo`, `hi` on consecutive cells of width `period`
    /// starting at `start`, over `count` cells.
    pub fn two_phase(lo: T, hi: T, start: T, period: T, count: usize) -> Result<Self> {
        let breaks = (0..=count).map(|k| start + period * T::from_usize_lossy(k)).collect();
        let mut values = vec![lo];
        values.extend((0..count).map(|k| if k % 2 == 0 { lo } else { hi }));
        values.push(lo);
        Self::new(breaks, values)
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }

    pub fn eval(&self, z: T) -> T {
        self.values[self.breaks.partition_point(|b| *b <= z)]
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `∫_lo^hi g(value(z)) dz`, exact for the piecewise-constant field.
    pub fn integrate(&self, lo: T, hi: T, g: impl Fn(T) -> T) -> T {
        if hi <= lo {
            return T::zero();
        }
        let mut acc = T::zero();
        let mut a = lo;
        let mut k = self.breaks.partition_point(|b| *b <= lo);
        while a < hi {
            let b = if k < self.breaks.len() { self.breaks[k].min(hi) } else { hi };
            if b > a {
                acc += (b - a) * g(self.values[k]);
            }
            a = b;
            k += 1;
        }
        acc
    }

    /// Mean value on `[lo, hi]`.
    pub fn mean(&self, lo: T, hi: T) -> T {
        self.integrate(lo, hi, |v| v) / (hi - lo)
    }

    /// Harmonic mean on `[lo, hi]`.
    pub fn harmonic_mean(&self, lo: T, hi: T) -> T {
        (hi - lo) / self.integrate(lo, hi, |v| v.recip())
    }

    /// Maximal intervals of constancy meeting `[lo, hi]`, clipped to it.
    pub fn pieces(&self, lo: T, hi: T) -> Vec<(T, T, T)> {
        let mut out = Vec::new();
        let mut a = lo;
        let mut k = self.breaks.partition_point(|b| *b <= lo);
        while a < hi {
            let b = if k < self.breaks.len() { self.breaks[k].min(hi) } else { hi };
            if b > a {
                out.push((a, b, self.values[k]));
            }
            a = b;
            k += 1;
        }
        out
    }
}

/// Leading coefficient `a`, time coefficient `a₀`, and zeroth-order
/// coefficient `c₀`, all piecewise constant in the same variable.
///
/// For [`Variable::Space`] the fields are functions of `s = log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughCoefficients<T> {
    pub variable: Variable,
    pub a0: PiecewiseConstant<T>,
    pub a: PiecewiseConstant<T>,
    pub c0: PiecewiseConstant<T>,
    /// Ellipticity: `ν ≤ a ≤ 1/ν`.
    pub nu: T,
    /// Bounds: `1/K ≤ a₀, c₀ ≤ K`.
    pub k: T,
}

impl<T: Real> RoughCoefficients<T> {
    /// `a₀ = c₀ = 1`, constant `a`, with the tightest admissible `ν`, `K`.
    pub fn constant(a: T) -> Self {
        Self {
            variable: Variable::Space,
            a0: PiecewiseConstant::constant(T::one()),
            a: PiecewiseConstant::constant(a),
            c0: PiecewiseConstant::constant(T::one()),
            nu: a.min(a.recip()),
            k: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > T::zero() && self.nu <= T::one()) {
            return Err(LabError::InvalidCoefficients(format!("nu must lie in (0, 1], got {}", self.nu)));
        }
        if !(self.k >= T::one()) || !self.k.is_finite() {
            return Err(LabError::InvalidCoefficients(format!("K must be at least 1, got {}", self.k)));
        }
        let slack = T::one() + T::epsilon() * T::from_usize_lossy(16);
        if self.a.min() * slack < self.nu || self.a.max() > slack / self.nu {
            return Err(LabError::InvalidCoefficients(format!(
                "a ranges over [{}, {}], outside [{}, {}]",
                self.a.min(),
                self.a.max(),
                self.nu,
                self.nu.recip()
            )));
        }
        for (name, f) in [("a0", &self.a0), ("c0", &self.c0)] {
            if f.min() * slack < self.k.recip() || f.max() > slack * self.k {
                return Err(LabError::InvalidCoefficients(format!(
                    "{name} ranges over [{}, {}], outside [1/K, K] with K={}",
                    f.min(),
                    f.max(),
                    self.k
                )));
            }
        }
        Ok(())
    }

    /// Short identifier used to tag reports.
    pub fn id(&self) -> String {
        let var = match self.variable {
            Variable::Space => "x",
            Variable::Time => "t",
        };
        let describe = |f: &PiecewiseConstant<T>| {
            if f.is_constant() {
                format!("{}", f.values()[0])
            } else {
                format!("pc{}[{},{}]", f.values().len(), f.min(), f.max())
            }
        };
        format!("{var}:a={};a0={};c0={}", describe(&self.a), describe(&self.a0), describe(&self.c0))
    }

    /// Space fields frozen at time `t` (identity for space dependence).
    pub(crate) fn frozen(&self, t: T) -> (PiecewiseConstant<T>, PiecewiseConstant<T>, PiecewiseConstant<T>) {
        match self.variable {
            Variable::Space => (self.a0.clone(), self.a.clone(), self.c0.clone()),
            Variable::Time => (
                PiecewiseConstant::constant(self.a0.eval(t)),
                PiecewiseConstant::constant(self.a.eval(t)),
                PiecewiseConstant::constant(self.c0.eval(t)),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_eval_and_integrals() {
        let f = PiecewiseConstant::new(vec![0.0f64, 1.0], vec![1.0, 4.0, 2.0]).unwrap();
        assert_eq!(f.eval(-1.0), 1.0);
        assert_eq!(f.eval(0.0), 4.0);
        assert_eq!(f.eval(5.0), 2.0);
        assert_eq!(f.integrate(-1.0, 2.0, |v| v), 1.0 + 4.0 + 2.0);
        assert!((f.harmonic_mean(0.5, 1.5) - 1.0 / (0.5 / 4.0 + 0.5 / 2.0)).abs() < 1e-15);
        assert_eq!(f.pieces(0.5, 1.5), vec![(0.5, 1.0, 4.0), (1.0, 1.5, 2.0)]);
    }

    #[test]
    fn two_phase_alternates() {
        let f = PiecewiseConstant::two_phase(0.5f64, 2.0, 0.0, 0.25, 4).unwrap();
        let vals: Vec<f64> = [0.1, 0.3, 0.6, 0.8, 1.2].iter().map(|t| f.eval(*t)).collect();
        assert_eq!(vals, vec![0.5, 2.0, 0.5, 2.0, 0.5]);
    }

    #[test]
    fn validation_uses_bounds() {
        let mut c = RoughCoefficients::constant(2.0f64);
        assert!(c.validate().is_ok());
        c.nu = 0.9;
        assert!(matches!(c.validate(), Err(LabError::InvalidCoefficients(_))));
        let mut c = RoughCoefficients::constant(1.0f64);
        c.c0 = PiecewiseConstant::constant(3.0);
        assert!(c.validate().is_err());
        c.k = 3.0;
        assert!(c.validate().is_ok());
        assert!(PiecewiseConstant::new(vec![1.0f64, 0.0], vec![1.0; 3]).is_err());
    }
}
