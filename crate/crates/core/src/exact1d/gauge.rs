use super::{EulerProblem, LowerOrderRatios};
use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Ratios after the substitution `v = x^γ u`.
pub fn shift_ratios<T: Real>(r: &LowerOrderRatios<T>, gamma: T) -> LowerOrderRatios<T> {
    LowerOrderRatios {
        n_b: r.n_b + gamma,
        n_bhat: r.n_bhat + gamma,
        n_c: r.n_c - gamma * (gamma + T::one()) - gamma * r.n_b - gamma * r.n_bhat,
    }
}

/// Problem satisfied by `x^γ u` when `u` solves `problem`: ratios as in
/// [`shift_ratios`], data `(x^γ F, x^γ f - γ x^{γ-1} F)`. The indicial
/// roots move by `-γ` and the matching weight exponent is `θ - γp`.
pub fn gauge_shift<T: Real>(problem: &EulerProblem<T>, gamma: T) -> EulerProblem<T> {
    let big_f = problem.big_f.times_power(gamma);
    let f = problem
        .f
        .times_power(gamma)
        .plus(&problem.big_f.times_power(gamma - T::one()).scaled(-gamma));
    EulerProblem { ratios: shift_ratios(&problem.ratios, gamma), big_f, f, ..problem.clone() }
}

/// The `γ` with `(2 - 2p)γ + θ + 1 + n_b - (p - 1) n_b̂ = 0`.
pub fn normalizing_gamma<T: Real>(p: T, theta: T, r: &LowerOrderRatios<T>) -> Result<T> {
    if p == T::one() {
        return Err(LabError::InvalidSpec("p = 1 has no normalizing shift".into()));
    }
    Ok((theta + T::one() + r.n_b - (p - T::one()) * r.n_bhat) / (p + p - T::one() - T::one()))
}
