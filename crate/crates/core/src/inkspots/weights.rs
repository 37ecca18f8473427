use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cover::Cylinder;
use super::hypothesis::{hypothesis_check, MIN_SCAN};
use super::interval_set::IntervalSet;
use crate::error::{LabError, Result};
use crate::scalar::{c, Real};
use crate::weighted::{ap_constant_estimate, TimeWeight};

/// Resolution of the `A_p` estimate used for the lemma constants.
pub const AP_RESOLUTION: usize = 1 << 12;
/// Coarser resolution compared against [`AP_RESOLUTION`].
pub const AP_COARSE: usize = 1 << 8;
/// Growth of the `A_p` estimate from [`AP_COARSE`] to [`AP_RESOLUTION`]
/// at which the weight is treated as outside the class.
pub const AP_DIVERGENCE: f64 = 10.0;
/// Calibrated `δ` is divided by this factor.
pub const DELTA_SAFETY: f64 = 1.05;
const CALIBRATION_SEED: u64 = 0x1c0_ffee;
const REL_SLACK: f64 = 1e-12;

/// Constants of the weighted covering bound for one weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InkConstants<T> {
    pub weight: TimeWeight<T>,
    pub p: T,
    /// Estimate of `[ω]_{A_p}`.
    pub ap: T,
    /// `N = 10^p [ω]²_{A_p}`.
    pub n: T,
    /// Exponent of `γ` in the bound.
    pub delta: T,
}

impl<T: Real> InkConstants<T> {
    /// `δ = 1` for the unit weight; otherwise the largest exponent that
    /// fits every calibration sample of [`calibrate_delta`], divided by
    /// [`DELTA_SAFETY`].
    pub fn for_weight(weight: TimeWeight<T>, p: T) -> Result<Self> {
        let ap = ap_constant_estimate(&weight, p, AP_RESOLUTION)?;
        let delta = match weight {
            TimeWeight::One => T::one(),
            TimeWeight::Power(_) => calibrate_delta(&weight, ap)? / c(DELTA_SAFETY),
        };
        let n = c::<T>(10.0).powf(p) * ap * ap;
        Ok(Self { weight, p, ap, n, delta })
    }
}

/// Lemma evaluation. `bound_rhs` and `conclusion_holds` are set only when
/// the hypothesis holds.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport<T> {
    pub hypothesis_holds: bool,
    pub counterexample: Option<(T, T)>,
    pub w_e: T,
    pub w_f: T,
    /// `N γ^δ ω(F)`.
    pub bound_rhs: Option<T>,
    pub conclusion_holds: Option<bool>,
    pub gamma: T,
    pub constants: InkConstants<T>,
}

/// Checks the hypothesis and, when it holds, `ω(E) ≤ N γ^δ ω(F)`.
pub fn evaluate_lemma<T: Real>(
    e: &IntervalSet<T>,
    f: &IntervalSet<T>,
    gamma: T,
    clip: T,
    constants: &InkConstants<T>,
) -> Result<LemmaReport<T>> {
    let h = hypothesis_check(e, f, gamma, clip, MIN_SCAN)?;
    let w_e = e.weighted_measure(&constants.weight);
    let w_f = f.weighted_measure(&constants.weight);
    let (bound_rhs, conclusion_holds) = if h.holds {
        let rhs = constants.n * gamma.powf(constants.delta) * w_f;
        (Some(rhs), Some(w_e <= rhs))
    } else {
        (None, None)
    };
    Ok(LemmaReport {
        hypothesis_holds: h.holds,
        counterexample: h.witness,
        w_e,
        w_f,
        bound_rhs,
        conclusion_holds,
        gamma,
        constants: *constants,
    })
}

/// [`evaluate_lemma`] with freshly estimated constants and no clipping.
///
/// Errors: [`LabError::HypothesisViolated`] with the witness when the
/// hypothesis fails.
pub fn ink_spots_bound<T: Real>(
    e: &IntervalSet<T>,
    f: &IntervalSet<T>,
    gamma: T,
    weight: TimeWeight<T>,
    p: T,
) -> Result<LemmaReport<T>> {
    let k = InkConstants::for_weight(weight, p)?;
    let rep = evaluate_lemma(e, f, gamma, T::infinity(), &k)?;
    match rep.counterexample {
        Some((t, r)) if !rep.hypothesis_holds => Err(LabError::HypothesisViolated { t: t.to_f64_lossy(), radius: r.to_f64_lossy() }),
        _ => Ok(rep),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoublingOutcome<T> {
    Holds { ap: T },
    Violated { t: T, radius: T },
    /// The `A_p` estimate diverges under refinement, so the weight is not
    /// treated as a member of the class.
    NotApplicable { ap_coarse: T, ap_fine: T },
}

impl<T> DoublingOutcome<T> {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds { .. })
    }
}

/// `ω(C_R(t)) ≤ R^p [ω]_{A_p} ω(C_1(t))` over `t ∈ {-4, -3.5, ..., 4}` and
/// `R = 2^{k/4}`, `k = 1..=40`.
pub fn doubling_check<T: Real>(w: &TimeWeight<T>, p: T) -> Result<DoublingOutcome<T>> {
    let coarse = ap_constant_estimate(w, p, AP_COARSE)?;
    let fine = ap_constant_estimate(w, p, AP_RESOLUTION)?;
    if fine >= coarse * c(AP_DIVERGENCE) {
        return Ok(DoublingOutcome::NotApplicable { ap_coarse: coarse, ap_fine: fine });
    }
    let slack = T::one() + c(REL_SLACK);
    for i in -8i32..=8 {
        let t: T = c(f64::from(i) * 0.5);
        let unit = w.measure(t - T::one(), t + T::one());
        for k in 1..=40 {
            let r: T = c(2f64.powf(f64::from(k) / 4.0));
            let big = w.measure(t - r, t + r);
            if big > r.powf(p) * fine * unit * slack {
                return Ok(DoublingOutcome::Violated { t, radius: r });
            }
        }
    }
    Ok(DoublingOutcome::Holds { ap: fine })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonOutcome<T> {
    /// `|E| / |C_R|`.
    pub length_ratio: T,
    /// `ω(E) / ω(C_R)`.
    pub weight_ratio: T,
    /// `N⁻¹ (|E|/|C_R|)^p`.
    pub lower: T,
    /// `N (|E|/|C_R|)^δ`.
    pub upper: T,
    pub holds: bool,
}

/// `N⁻¹ (|E|/|C|)^p ≤ ω(E)/ω(C) ≤ N (|E|/|C|)^δ` for `E ⊂ C`.
///
/// Errors: [`LabError::DomainError`] if `E ⊄ C` or `ω(C) = 0`.
pub fn measure_comparison_check<T: Real>(
    w: &TimeWeight<T>,
    p: T,
    e: &IntervalSet<T>,
    cylinder: &Cylinder<T>,
    n: T,
    delta: T,
) -> Result<ComparisonOutcome<T>> {
    let (lo, hi) = cylinder.interval();
    if !e.is_subset_of(&IntervalSet::single(lo, hi)?) {
        return Err(LabError::DomainError(format!("set is not inside ({lo}, {hi})")));
    }
    let wc = w.measure(lo, hi);
    if !(wc > T::zero()) {
        return Err(LabError::DomainError(format!("cylinder ({lo}, {hi}) has zero weight")));
    }
    let length_ratio = e.measure() / (hi - lo);
    let weight_ratio = e.weighted_measure(w) / wc;
    let lower = length_ratio.powf(p) / n;
    let upper = n * length_ratio.powf(delta);
    let slack: T = c(REL_SLACK);
    let holds = lower <= weight_ratio * (T::one() + slack) && weight_ratio <= upper * (T::one() + slack);
    Ok(ComparisonOutcome { length_ratio, weight_ratio, lower, upper, holds })
}

/// Deterministic sample of `(E, C)` pairs with `E ⊂ C`: end pieces of
/// several fractions on both sides of `C` plus random sub-unions.
pub fn comparison_samples<T: Real>(seed: u64) -> Vec<(IntervalSet<T>, Cylinder<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &t in &[-3.0, -1.0, -0.25, 0.0, 0.5, 2.0] {
        for &r in &[0.1, 0.5, 1.0, 4.0] {
            let cyl = Cylinder::new(c(t), c(r));
            let (lo, hi) = (t - r, t + r);
            for &rho in &[0.5, 0.25, 0.1, 0.01, 0.001] {
                let len = 2.0 * r * rho;
                for piece in [(lo, lo + len), (hi - len, hi), (t - len / 2.0, t + len / 2.0)] {
                    if let Ok(s) = IntervalSet::single(c(piece.0), c(piece.1)) {
                        out.push((s, cyl));
                    }
                }
            }
            for _ in 0..10 {
                let k = rng.gen_range(1..=4);
                let pieces = (0..k)
                    .map(|_| {
                        let a: f64 = rng.gen_range(lo..hi);
                        let b: f64 = rng.gen_range(a..=hi);
                        (c(a), c(b.max(a + 1e-6 * r).min(hi)))
                    })
                    .filter(|(a, b): &(T, T)| a < b)
                    .collect();
                if let Ok(s) = IntervalSet::new(pieces) {
                    if !s.is_empty() {
                        out.push((s, cyl));
                    }
                }
            }
        }
    }
    out
}

/// Largest `δ ≤ 1` with `ω(E)/ω(C) ≤ n (|E|/|C|)^δ` on every sample of
/// [`comparison_samples`]. [`InkConstants::for_weight`] passes
/// `n = [ω]_{A_p}`.
///
/// Errors: [`LabError::DomainError`] if no positive `δ` fits.
pub fn calibrate_delta<T: Real>(w: &TimeWeight<T>, n: T) -> Result<T> {
    let mut delta = T::one();
    for (e, cyl) in comparison_samples::<T>(CALIBRATION_SEED) {
        let (lo, hi) = cyl.interval();
        let rho = e.measure() / (hi - lo);
        let mu = e.weighted_measure(w) / w.measure(lo, hi);
        if rho < T::one() && mu > T::zero() {
            // μ ≤ n ρ^δ  ⇔  δ ≤ (ln μ - ln n) / ln ρ
            delta = delta.min((mu.ln() - n.ln()) / rho.ln());
        }
    }
    if delta > T::zero() {
        Ok(delta)
    } else {
        Err(LabError::DomainError(format!("no positive exponent fits the comparison samples (got {delta})")))
    }
}
