use super::{admissible_theta, EulerProblem, IndicialRoots, Regime};
use crate::error::{LabError, Result};
use crate::grid::LogGrid;
use crate::quadrature::{gl8_node, two_exponential_tail};
use crate::scalar::{c, Real};
use crate::weighted::{lp_theta_norm, NormSpec, SampledFunction, SmoothBump};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Accumulate from `-∞`.
    Left,
    /// Accumulate from `+∞`.
    Right,
}

/// One homogeneous branch `± K e^{-z s} ∫ e^{zσ} g_z(σ) dσ`, stored scaled
/// as `acc(s) = ∫ e^{z(σ - s)} g_z(σ) dσ` over `(-∞, s)` or `(s, ∞)`.
#[derive(Debug, Clone)]
struct Branch<T> {
    z: T,
    side: Side,
    sign: T,
    acc: Vec<T>,
}

/// Closed-form solution of an [`EulerProblem`] sampled on a grid.
///
/// In `s = log x` the solution is `u = c₁(s) e^{-αs} + c₂(s) e^{-βs}` with
/// `c₁' = -K e^{αs} g`, `c₂' = K e^{βs} g`, `K = 1/(a(β-α))`, and `g`
/// the right-hand side. The integration constants are fixed by the
/// regime of `θ`: both branches accumulate from the left below the window,
/// from the right above it, and inside the window the `e^{-αs}` branch
/// accumulates from the right and the `e^{-βs}` branch from the left. This
/// is the only choice with `u, x Du ∈ L_{p,θ}`.
///
/// The `F` contribution is integrated by parts, so `g_z(σ) =
/// -(z-1) e^{-σ} F̃(σ) + f̃(σ)` and
/// `x Du = -α c₁ e^{-αs} - β c₂ e^{-βs} - F̃ e^{-s}/a`. Outside the grid the data vanish and both branches are
/// pure powers, which the norms integrate analytically.
#[derive(Debug, Clone)]
pub struct ExactSolution<T> {
    problem: EulerProblem<T>,
    roots: IndicialRoots<T>,
    regime: Regime,
    p: T,
    theta: T,
    k: T,
    grid: LogGrid<T>,
    branches: [Branch<T>; 2],
    bps: Vec<T>,
}

impl<T: Real> ExactSolution<T> {
    /// `∫_a^b e^{z(σ - s_ref)} g_z(σ) dσ`.
    fn segment(&self, z: T, a: T, b: T, s_ref: T) -> T {
        segment(&self.problem, &self.bps, self.grid.h(), z, a, b, s_ref)
    }

    pub fn grid(&self) -> &LogGrid<T> {
        &self.grid
    }

    pub fn roots(&self) -> IndicialRoots<T> {
        self.roots
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn problem(&self) -> &EulerProblem<T> {
        &self.problem
    }

    fn branch_at_node(&self, b: &Branch<T>, j: usize) -> T {
        b.sign * self.k * b.acc[j]
    }

    /// Values of the `e^{-αs}` and `e^{-βs}` branches at `s`.
    fn branches_at(&self, s: T) -> [T; 2] {
        let g = &self.grid;
        let n = g.len();
        let value = |b: &Branch<T>| -> T {
            let acc = if s >= g.s_max() {
                match b.side {
                    Side::Left => (-b.z * (s - g.s_max())).exp() * b.acc[n - 1],
                    Side::Right => T::zero(),
                }
            } else if s <= g.s_min() {
                match b.side {
                    Side::Left => T::zero(),
                    Side::Right => (b.z * (g.s_min() - s)).exp() * b.acc[0],
                }
            } else {
                let j = g.cell_index(s);
                match b.side {
                    Side::Left => (-b.z * (s - g.s(j))).exp() * b.acc[j] + self.segment(b.z, g.s(j), s, s),
                    Side::Right => {
                        (b.z * (g.s(j + 1) - s)).exp() * b.acc[j + 1] + self.segment(b.z, s, g.s(j + 1), s)
                    }
                }
            };
            b.sign * self.k * acc
        };
        [value(&self.branches[0]), value(&self.branches[1])]
    }

    /// `(u, x Du)` at `s = log x`, anywhere on the line.
    pub fn eval(&self, s: T) -> (T, T) {
        let [ta, tb] = self.branches_at(s);
        let u = ta + tb;
        let xdu = -self.roots.alpha * ta - self.roots.beta * tb - self.problem.big_f.eval(s) * (-s).exp() / self.problem.a;
        (u, xdu)
    }

    /// Node values of `u`.
    pub fn u(&self) -> SampledFunction<T> {
        let vals = (0..self.grid.len())
            .map(|j| self.branch_at_node(&self.branches[0], j) + self.branch_at_node(&self.branches[1], j))
            .collect();
        SampledFunction::new(self.grid, vals, crate::weighted::Interp::Linear).expect("finite solution")
    }

    /// Node values of `x Du`.
    pub fn xdu(&self) -> SampledFunction<T> {
        let (al, be, a) = (self.roots.alpha, self.roots.beta, self.problem.a);
        let vals = (0..self.grid.len())
            .map(|j| {
                let s = self.grid.s(j);
                -al * self.branch_at_node(&self.branches[0], j) - be * self.branch_at_node(&self.branches[1], j)
                    - self.problem.big_f.eval(s) * (-s).exp() / a
            })
            .collect();
        SampledFunction::new(self.grid, vals, crate::weighted::Interp::Linear).expect("finite derivative")
    }

    /// `u` with exact node derivatives attached.
    pub fn u_with_derivative(&self) -> SampledFunction<T> {
        self.u().with_derivative(self.xdu().values().to_vec()).expect("matching lengths")
    }

    /// `∫_{tail} |k_α A e^{-α(s-S)} + k_β B e^{-β(s-S)}|^p e^{θs} ds` on
    /// both sides of the grid, for branch multipliers `(k_α, k_β)`.
    fn tails(&self, p: T, theta: T, mult: (T, T)) -> Result<T> {
        let g = &self.grid;
        let n = g.len();
        let (al, be) = (self.roots.alpha, self.roots.beta);
        let delta = be - al;
        let a_hi = mult.0 * self.branch_at_node(&self.branches[0], n - 1);
        let b_hi = mult.1 * self.branch_at_node(&self.branches[1], n - 1);
        let right = two_exponential_tail(a_hi, b_hi, al * p - theta, delta, p)?;
        let a_lo = mult.0 * self.branch_at_node(&self.branches[0], 0);
        let b_lo = mult.1 * self.branch_at_node(&self.branches[1], 0);
        let left = two_exponential_tail(b_lo, a_lo, theta - be * p, delta, p)?;
        let mut total = T::zero();
        if right != T::zero() {
            total += (theta * g.s_max()).exp() * right;
        }
        if left != T::zero() {
            total += (theta * g.s_min()).exp() * left;
        }
        Ok(total)
    }

    /// `(‖u‖_{L_{p,θ}}, ‖x Du‖_{L_{p,θ}})` over the whole half line: grid
    /// part by quadrature of the linear interpolant, tails in closed form.
    pub fn norms(&self) -> Result<(T, T)> {
        self.norms_with(self.p, self.theta)
    }

    /// As [`Self::norms`] for another exponent pair.
    pub fn norms_with(&self, p: T, theta: T) -> Result<(T, T)> {
        let spec = NormSpec::new(p, theta)?;
        let inner_u = lp_theta_norm(&self.u(), &spec)?.powf(p);
        let inner_d = lp_theta_norm(&self.xdu(), &spec)?.powf(p);
        let tail_u = self.tails(p, theta, (T::one(), T::one()))?;
        let tail_d = self.tails(p, theta, (-self.roots.alpha, -self.roots.beta))?;
        Ok(((inner_u + tail_u).powf(p.recip()), (inner_d + tail_d).powf(p.recip())))
    }

    /// Weak form tested against `ψ` in `s`:
    /// `∫ a v'ψ' + a(1 + n_b) v'ψ - a n_b̂ v ψ' + (a n_c + λ) v ψ ds`
    /// minus `∫ -F̃ e^{-s}(ψ' - ψ) + f̃ ψ ds`.
    ///
    /// Returns `(residual, scale)` with `scale` the sum of the absolute
    /// values of the individual integrals.
    pub fn weak_residual(&self, test: &SmoothBump<T>) -> (T, T) {
        let pb = &self.problem;
        let a = pb.a;
        let r = &pb.ratios;
        let (lo, hi) = test.support();
        let mut pts = vec![lo, hi];
        pts.extend(self.bps.iter().copied().filter(|b| *b > lo && *b < hi));
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let panel = c::<T>(0.01);
        let mut terms = [T::zero(); 6];
        for w in pts.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if s1 <= s0 {
                continue;
            }
            let m = ((s1 - s0) / panel).ceil().to_usize().unwrap_or(1).max(1);
            let width = (s1 - s0) / T::from_usize_lossy(m);
            for k in 0..m {
                let p0 = s0 + width * T::from_usize_lossy(k);
                let p1 = if k + 1 == m { s1 } else { p0 + width };
                let mid = (p0 + p1) * c(0.5);
                let half = (p1 - p0) * c(0.5);
                for q in 0..8 {
                    let (node, weight) = gl8_node(q);
                    let s = mid + half * node;
                    let wt = half * weight;
                    let (v, dv) = self.eval(s);
                    let (psi, dpsi) = (test.eval(s), test.derivative(s));
                    terms[0] += wt * a * dv * dpsi;
                    terms[1] += wt * a * (T::one() + r.n_b) * dv * psi;
                    terms[2] -= wt * a * r.n_bhat * v * dpsi;
                    terms[3] += wt * (a * r.n_c + pb.lambda) * v * psi;
                    terms[4] -= wt * pb.big_f.eval(s) * (-s).exp() * (dpsi - psi);
                    terms[5] += wt * pb.f.eval(s) * psi;
                }
            }
        }
        let lhs = terms[0] + terms[1] + terms[2] + terms[3];
        let rhs = terms[4] + terms[5];
        let scale = terms.iter().fold(T::zero(), |acc, t| acc + t.abs());
        (lhs - rhs, scale)
    }
}

fn segment<T: Real>(pb: &EulerProblem<T>, bps: &[T], panel: T, z: T, a: T, b: T, s_ref: T) -> T {
    if b <= a {
        return T::zero();
    }
    let mut v = T::zero();
    if let Some((lo, hi)) = pb.f.support() {
        if b > lo && a < hi {
            v += pb.f.integrate_weighted(a.max(lo), b.min(hi), bps, panel, |s| (z * (s - s_ref)).exp());
        }
    }
    if let Some((lo, hi)) = pb.big_f.support() {
        if b > lo && a < hi {
            let k = -(z - T::one());
            v += pb
                .big_f
                .integrate_weighted(a.max(lo), b.min(hi), bps, panel, |s| k * (z * (s - s_ref) - s).exp());
        }
    }
    v
}

/// Exact solution on `grid` for weight exponents `p`, `θ`.
///
/// Errors: [`LabError::ForbiddenExponent`] within `1e-8` of `αp` or `βp`;
/// [`LabError::DegenerateRoots`] when the roots coincide;
/// [`LabError::SupportError`] if the data are not supported inside the
/// grid.
pub fn euler_solve_exact<T: Real>(
    problem: &EulerProblem<T>,
    p: T,
    theta: T,
    grid: &LogGrid<T>,
) -> Result<ExactSolution<T>> {
    problem.validate()?;
    grid.require_solver_size()?;
    let roots = problem.roots()?;
    let regime = admissible_theta(&roots, p)?.regime(theta)?;
    if let Some((lo, hi)) = problem.data_support() {
        if lo < grid.s_min() || hi > grid.s_max() {
            return Err(LabError::SupportError(format!(
                "data supported on [{lo}, {hi}] in log x, grid covers [{}, {}]",
                grid.s_min(),
                grid.s_max()
            )));
        }
    }
    let k = (problem.a * (roots.beta - roots.alpha)).recip();
    let (side_a, sign_a, side_b, sign_b) = match regime {
        Regime::Below => (Side::Left, -T::one(), Side::Left, T::one()),
        Regime::Above => (Side::Right, T::one(), Side::Right, -T::one()),
        Regime::Inside => (Side::Right, T::one(), Side::Left, T::one()),
    };
    let mut bps = problem.big_f.breakpoints();
    bps.extend(problem.f.breakpoints());
    bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    bps.dedup();
    let n = grid.len();
    let h = grid.h();
    let panel = grid.h();
    let support = problem.data_support();
    let touches = |j: usize| support.is_some_and(|(lo, hi)| grid.s(j + 1) > lo && grid.s(j) < hi);
    let accumulate = |z: T, side: Side| -> Vec<T> {
        let mut acc = vec![T::zero(); n];
        match side {
            Side::Left => {
                let decay = (-z * h).exp();
                for j in 0..n - 1 {
                    let s1 = grid.s(j + 1);
                    let inc = if touches(j) { segment(problem, &bps, panel, z, grid.s(j), s1, s1) } else { T::zero() };
                    acc[j + 1] = decay * acc[j] + inc;
                }
            }
            Side::Right => {
                let grow = (z * h).exp();
                for j in (0..n - 1).rev() {
                    let s0 = grid.s(j);
                    let inc = if touches(j) { segment(problem, &bps, panel, z, s0, grid.s(j + 1), s0) } else { T::zero() };
                    acc[j] = grow * acc[j + 1] + inc;
                }
            }
        }
        acc
    };
    let branches = [
        Branch { z: roots.alpha, side: side_a, sign: sign_a, acc: accumulate(roots.alpha, side_a) },
        Branch { z: roots.beta, side: side_b, sign: sign_b, acc: accumulate(roots.beta, side_b) },
    ];
    if branches.iter().any(|b| b.acc.iter().any(|v| !v.is_finite())) {
        return Err(LabError::QuadratureError("non-finite branch integral".into()));
    }
    Ok(ExactSolution { problem: problem.clone(), roots, regime, p, theta, k, grid: *grid, branches, bps })
}
