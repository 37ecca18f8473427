//! Experiment configuration: TOML schema, defaults, and validation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use degenlab_core::exact1d::{admissible_theta, EulerProblem, LowerOrderRatios, Regime};
use degenlab_core::profile::Profile;
use degenlab_core::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Norms,
    Hardy,
    EulerExact,
    SolveElliptic,
    SolveParabolic,
    BsPrice,
    ThetaSweep,
    LambdaSweep,
    InkSpots,
    ApWeight,
    Convergence,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Self::Norms,
        Self::Hardy,
        Self::EulerExact,
        Self::SolveElliptic,
        Self::SolveParabolic,
        Self::BsPrice,
        Self::ThetaSweep,
        Self::LambdaSweep,
        Self::InkSpots,
        Self::ApWeight,
        Self::Convergence,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Norms => "norms",
            Self::Hardy => "hardy",
            Self::EulerExact => "euler-exact",
            Self::SolveElliptic => "solve-elliptic",
            Self::SolveParabolic => "solve-parabolic",
            Self::BsPrice => "bs-price",
            Self::ThetaSweep => "theta-sweep",
            Self::LambdaSweep => "lambda-sweep",
            Self::InkSpots => "ink-spots",
            Self::ApWeight => "ap-weight",
            Self::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `u(x) = x e^{-x}`.
    #[default]
    Gamma,
    /// Seeded random bump sums.
    Bumps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    Exact,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    CrankNicolson,
    ImplicitEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientVariable {
    #[default]
    Space,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffKind {
    #[default]
    Call,
    Put,
    Indicator,
    Constant,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    #[default]
    Oracle,
    Manufactured,
    Temporal,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

/// Uniform grid in `s = log x`; give either `n` or `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub s_min: f64,
    pub s_max: f64,
    pub n: Option<usize>,
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_end: f64,
    pub steps: usize,
    pub scheme: Scheme,
    pub rannacher: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { t_end: 1.0, steps: 64, scheme: Scheme::CrankNicolson, rannacher: 2 }
    }
}

/// Periodic two-valued pattern of `count` cells of length `period / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPhase {
    pub lo: f64,
    pub hi: f64,
    pub start: f64,
    pub period: f64,
    pub count: usize,
}

/// Piecewise-constant leading coefficient for the finite-difference solvers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientConfig {
    pub variable: CoefficientVariable,
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
    pub two_phase: Option<TwoPhase>,
    pub nu: Option<f64>,
}

/// Operator ratios and data; data pieces are `[x0, x1, value]` in `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub a: f64,
    pub n_b: f64,
    pub n_bhat: f64,
    pub n_c: f64,
    pub lambda: f64,
    pub f: Vec<[f64; 3]>,
    pub big_f: Vec<[f64; 3]>,
    pub initial: Vec<[f64; 3]>,
    pub coefficients: Option<CoefficientConfig>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            n_b: 0.0,
            n_bhat: 0.0,
            n_c: 0.0,
            lambda: 0.0,
            f: vec![[1.0, 2.0, 1.0]],
            big_f: Vec::new(),
            initial: Vec::new(),
            coefficients: None,
        }
    }
}

impl ProblemConfig {
    pub fn ratios(&self) -> LowerOrderRatios<f64> {
        LowerOrderRatios::new(self.n_b, self.n_bhat, self.n_c)
    }

    pub fn euler(&self) -> Result<EulerProblem<f64>, LabError> {
        Ok(EulerProblem::new(self.a, self.ratios(), pieces(&self.big_f)?, pieces(&self.f)?).with_lambda(self.lambda))
    }
}

/// Sum of indicator pieces `[x0, x1, value]`.
pub fn pieces(p: &[[f64; 3]]) -> Result<Profile<f64>, LabError> {
    p.iter().try_fold(Profile::zero(), |acc, &[x0, x1, k]| Ok(acc.plus(&Profile::indicator_x(x0, x1, k)?)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    pub family: Family,
    pub count: usize,
    pub p: Vec<f64>,
    pub theta: Vec<f64>,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self { family: Family::Bumps, count: 8, p: vec![2.0], theta: vec![-1.0, 0.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardyConfig {
    pub family: Family,
    pub count: usize,
    pub p: Vec<f64>,
    pub theta: Vec<f64>,
}

impl Default for HardyConfig {
    fn default() -> Self {
        Self { family: Family::Gamma, count: 8, p: vec![2.0], theta: vec![1.0] }
    }
}

/// Single `(p, θ)` pair for the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub p: f64,
    pub theta: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { p: 2.0, theta: -1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BsConfig {
    pub sigma: f64,
    pub r: f64,
    pub horizon: f64,
    pub payoff: PayoffKind,
    pub strike: f64,
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub spots: Vec<f64>,
    pub fd: bool,
    pub fd_nodes: usize,
    pub fd_steps: usize,
    pub fd_half_width: f64,
}

impl Default for BsConfig {
    fn default() -> Self {
        Self {
            sigma: 0.2,
            r: 0.05,
            horizon: 1.0,
            payoff: PayoffKind::Call,
            strike: 100.0,
            lo: 90.0,
            hi: 110.0,
            value: 1.0,
            spots: vec![80.0, 90.0, 100.0, 110.0, 120.0],
            fd: false,
            fd_nodes: 2049,
            fd_steps: 1024,
            fd_half_width: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThetaSweepConfig {
    pub p: Vec<f64>,
    pub solver: Solver,
}

impl Default for ThetaSweepConfig {
    fn default() -> Self {
        Self { p: vec![2.0], solver: Solver::Exact }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaSweepConfig {
    pub p: f64,
    pub theta: f64,
    pub lambdas: Vec<f64>,
}

impl Default for LambdaSweepConfig {
    fn default() -> Self {
        Self { p: 2.0, theta: -1.0, lambdas: degenlab_core::verifier::default_lambdas() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InkConfig {
    pub e: Vec<[f64; 2]>,
    pub f: Vec<[f64; 2]>,
    pub gamma: Vec<f64>,
    pub weight_exponent: f64,
    pub p: f64,
    pub clip: Option<f64>,
    /// When positive, replaces `e` by this many seeded random sets and `f`
    /// by a padded hull of each.
    pub random_sets: usize,
}

impl Default for InkConfig {
    fn default() -> Self {
        Self {
            e: vec![[0.0, 1.0]],
            f: vec![[-1.0, 2.0]],
            gamma: vec![0.5],
            weight_exponent: 0.0,
            p: 2.0,
            clip: None,
            random_sets: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApConfig {
    pub exponents: Vec<f64>,
    pub p: Vec<f64>,
    pub resolutions: Vec<usize>,
    pub doubling: bool,
}

impl Default for ApConfig {
    fn default() -> Self {
        Self { exponents: vec![0.0, 0.5, 2.0], p: vec![2.0], resolutions: vec![256, 1024, 4096], doubling: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    pub study: Study,
    pub p: f64,
    pub theta: f64,
    pub levels: usize,
    pub width: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { study: Study::Oracle, p: 2.0, theta: -1.0, levels: 4, width: 6.5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub norms: NormsConfig,
    #[serde(default)]
    pub hardy: HardyConfig,
    #[serde(default)]
    pub exact: SolveConfig,
    #[serde(default)]
    pub elliptic: SolveConfig,
    #[serde(default)]
    pub parabolic: SolveConfig,
    #[serde(default)]
    pub bs: BsConfig,
    #[serde(default)]
    pub theta_sweep: ThetaSweepConfig,
    #[serde(default)]
    pub lambda_sweep: LambdaSweepConfig,
    #[serde(default)]
    pub ink: InkConfig,
    #[serde(default)]
    pub ap: ApConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
}

pub const DEFAULT_SEED: u64 = 20_240_611;

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// SHA-256 of the configuration for `kind`, without its output section.
    pub fn hash(&self, kind: Experiment) -> String {
        let view = Self { experiment: Some(kind), output: OutputConfig::default(), seed: Some(self.seed()), ..self.clone() };
        let bytes = serde_json::to_vec(&view).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: Option<String>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(field: Option<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, field, line: None, column: None, message: message.into() }
    }

    pub fn warning(field: Option<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, field, line: None, column: None, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let head = &text[..offset.min(text.len())];
    let line = head.matches('\n').count() + 1;
    let col = head.len() - head.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Line of `section.key` (or of `key` at top level) in the source text.
fn locate(text: &str, field: &str) -> Option<usize> {
    let (section, key) = match field.rsplit_once('.') {
        Some((s, k)) => (s, k),
        None => ("", field),
    };
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[') {
            current = h.trim_end_matches(']').trim().to_string();
            if current == field {
                return Some(i + 1);
            }
            continue;
        }
        let k = line.split('=').next().unwrap_or("").trim();
        if current == section && k == key {
            return Some(i + 1);
        }
    }
    None
}

/// Field named in a serde error message such as "unknown field `x`".
fn named_field(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

/// Parses and schema-checks a configuration.
pub fn parse(text: &str) -> Result<ExperimentConfig, Diagnostic> {
    toml::from_str::<ExperimentConfig>(text).map_err(|e| {
        let message = e.message().to_string();
        let (line, column) = match e.span() {
            Some(span) => {
                let (l, c) = line_col(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        Diagnostic { severity: Severity::Error, field: named_field(&message), line, column, message }
    })
}

fn check_p(out: &mut Vec<Diagnostic>, field: &str, p: f64) {
    if !(p > 1.0 && p.is_finite()) {
        out.push(Diagnostic::error(Some(field.into()), format!("p must be a finite number above 1, got {p}")));
    }
}

fn check_list(out: &mut Vec<Diagnostic>, field: &str, v: &[f64]) {
    if v.is_empty() {
        out.push(Diagnostic::error(Some(field.into()), "list must not be empty"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        out.push(Diagnostic::error(Some(field.into()), "list entries must be finite"));
    }
}

fn check_pieces(out: &mut Vec<Diagnostic>, field: &str, v: &[[f64; 3]]) {
    for [x0, x1, k] in v {
        if !(*x0 > 0.0 && x1 > x0 && k.is_finite()) {
            out.push(Diagnostic::error(Some(field.into()), format!("piece [{x0}, {x1}, {k}] needs 0 < x0 < x1 and a finite value")));
        }
    }
}

fn check_intervals(out: &mut Vec<Diagnostic>, field: &str, v: &[[f64; 2]]) {
    for [a, b] in v {
        if !(a < b && a.is_finite() && b.is_finite()) {
            out.push(Diagnostic::error(Some(field.into()), format!("interval [{a}, {b}] needs a < b")));
        }
    }
}

/// Warns when θ sits on an endpoint of the admissible window of `problem`.
fn check_window(out: &mut Vec<Diagnostic>, field: &str, problem: &ProblemConfig, p: f64, theta: f64) {
    let pb = EulerProblem::new(problem.a, problem.ratios(), Profile::zero(), Profile::zero()).with_lambda(problem.lambda);
    let roots = match pb.roots() {
        Ok(r) => r,
        Err(e) => {
            out.push(Diagnostic::error(Some("problem".into()), e.to_string()));
            return;
        }
    };
    let Ok(window) = admissible_theta(&roots, p) else { return };
    if let Err(LabError::ForbiddenExponent { endpoint, .. }) = window.regime(theta) {
        out.push(Diagnostic::warning(
            Some(field.into()),
            format!(
                "theta = {theta} is the endpoint {endpoint} of the admissible window ({}, {}) for p = {p}",
                window.lower, window.upper
            ),
        ));
    }
}

fn check_solve(out: &mut Vec<Diagnostic>, section: &str, s: &SolveConfig, problem: &ProblemConfig) {
    check_p(out, &format!("{section}.p"), s.p);
    if !s.theta.is_finite() {
        out.push(Diagnostic::error(Some(format!("{section}.theta")), "theta must be finite"));
    } else if s.p > 1.0 {
        check_window(out, &format!("{section}.theta"), problem, s.p, s.theta);
    }
}

/// Semantic checks for `kind`, or for every kind when `None`.
pub fn check(config: &ExperimentConfig, kind: Option<Experiment>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let (Some(k), Some(c)) = (kind, config.experiment) {
        if k != c {
            out.push(Diagnostic::error(
                Some("experiment".into()),
                format!("config is for `{}` but `{}` was requested", c.as_str(), k.as_str()),
            ));
        }
    }
    if let Some(g) = &config.grid {
        if !(g.s_min < g.s_max) || !g.s_min.is_finite() || !g.s_max.is_finite() {
            out.push(Diagnostic::error(Some("grid.s_min".into()), "need finite s_min < s_max"));
        }
        match (g.n, g.h) {
            (Some(_), Some(_)) => out.push(Diagnostic::error(Some("grid.h".into()), "give either n or h, not both")),
            (None, None) => out.push(Diagnostic::error(Some("grid".into()), "give one of n or h")),
            (Some(n), None) if n < 3 => out.push(Diagnostic::error(Some("grid.n".into()), "need at least 3 nodes")),
            (None, Some(h)) if !(h > 0.0) => out.push(Diagnostic::error(Some("grid.h".into()), "h must be positive")),
            _ => {}
        }
    }
    let pb = &config.problem;
    for (name, v) in [("problem.a", pb.a), ("problem.n_b", pb.n_b), ("problem.n_bhat", pb.n_bhat), ("problem.n_c", pb.n_c)] {
        if !v.is_finite() {
            out.push(Diagnostic::error(Some(name.into()), "must be finite"));
        }
    }
    if !(pb.a > 0.0) {
        out.push(Diagnostic::error(Some("problem.a".into()), "leading coefficient must be positive"));
    }
    if !(pb.lambda >= 0.0) {
        out.push(Diagnostic::error(Some("problem.lambda".into()), "lambda must be nonnegative"));
    }
    check_pieces(&mut out, "problem.f", &pb.f);
    check_pieces(&mut out, "problem.big_f", &pb.big_f);
    check_pieces(&mut out, "problem.initial", &pb.initial);
    if let Some(c) = &pb.coefficients {
        if c.two_phase.is_none() && c.values.len() != c.breaks.len() + 1 && !c.values.is_empty() {
            out.push(Diagnostic::error(
                Some("problem.coefficients.values".into()),
                "need one more value than breaks",
            ));
        }
    }
    let t = &config.time;
    if !(t.t_end > 0.0) || t.steps < 4 {
        out.push(Diagnostic::error(Some("time.steps".into()), "need t_end > 0 and at least 4 steps"));
    }
    let wants = |k: Experiment| kind.or(config.experiment).is_none_or(|c| c == k);
    if wants(Experiment::Norms) {
        check_list(&mut out, "norms.p", &config.norms.p);
        check_list(&mut out, "norms.theta", &config.norms.theta);
        config.norms.p.iter().for_each(|&p| check_p(&mut out, "norms.p", p));
    }
    if wants(Experiment::Hardy) {
        check_list(&mut out, "hardy.p", &config.hardy.p);
        check_list(&mut out, "hardy.theta", &config.hardy.theta);
        config.hardy.p.iter().for_each(|&p| check_p(&mut out, "hardy.p", p));
    }
    if wants(Experiment::EulerExact) {
        check_solve(&mut out, "exact", &config.exact, pb);
    }
    if wants(Experiment::SolveElliptic) {
        check_solve(&mut out, "elliptic", &config.elliptic, pb);
    }
    if wants(Experiment::SolveParabolic) {
        check_solve(&mut out, "parabolic", &config.parabolic, pb);
    }
    if wants(Experiment::BsPrice) {
        let b = &config.bs;
        if !(b.sigma > 0.0 && b.horizon > 0.0 && b.r.is_finite()) {
            out.push(Diagnostic::error(Some("bs.sigma".into()), "need sigma > 0, horizon > 0 and a finite rate"));
        }
        if b.spots.is_empty() || b.spots.iter().any(|x| !(*x > 0.0)) {
            out.push(Diagnostic::error(Some("bs.spots".into()), "spots must be a nonempty list of positive prices"));
        }
        if b.fd && (b.fd_nodes < 3 || b.fd_steps < 4 || !(b.fd_half_width > 0.0)) {
            out.push(Diagnostic::error(Some("bs.fd_nodes".into()), "finite-difference grid is too small"));
        }
    }
    if wants(Experiment::ThetaSweep) {
        check_list(&mut out, "theta_sweep.p", &config.theta_sweep.p);
        config.theta_sweep.p.iter().for_each(|&p| check_p(&mut out, "theta_sweep.p", p));
    }
    if wants(Experiment::LambdaSweep) {
        let l = &config.lambda_sweep;
        check_list(&mut out, "lambda_sweep.lambdas", &l.lambdas);
        if l.lambdas.iter().any(|x| *x < 0.0) {
            out.push(Diagnostic::error(Some("lambda_sweep.lambdas".into()), "lambdas must be nonnegative"));
        }
        let s = SolveConfig { p: l.p, theta: l.theta };
        check_solve(&mut out, "lambda_sweep", &s, &ProblemConfig { lambda: 0.0, ..pb.clone() });
    }
    if wants(Experiment::InkSpots) {
        let k = &config.ink;
        check_intervals(&mut out, "ink.e", &k.e);
        check_intervals(&mut out, "ink.f", &k.f);
        check_list(&mut out, "ink.gamma", &k.gamma);
        if k.gamma.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            out.push(Diagnostic::error(Some("ink.gamma".into()), "gamma must lie in (0, 1)"));
        }
        if !(k.weight_exponent > -1.0) {
            out.push(Diagnostic::error(Some("ink.weight_exponent".into()), "power weight needs exponent > -1"));
        }
        check_p(&mut out, "ink.p", k.p);
    }
    if wants(Experiment::ApWeight) {
        let a = &config.ap;
        check_list(&mut out, "ap.exponents", &a.exponents);
        check_list(&mut out, "ap.p", &a.p);
        a.p.iter().for_each(|&p| check_p(&mut out, "ap.p", p));
        if a.exponents.iter().any(|x| !(*x > -1.0)) {
            out.push(Diagnostic::error(Some("ap.exponents".into()), "power weight needs exponent > -1"));
        }
        if a.resolutions.is_empty() || a.resolutions.iter().any(|n| *n < 2) {
            out.push(Diagnostic::error(Some("ap.resolutions".into()), "resolutions must be at least 2"));
        }
    }
    if wants(Experiment::Convergence) {
        let c = &config.convergence;
        if c.levels < 2 {
            out.push(Diagnostic::error(Some("convergence.levels".into()), "need at least 2 levels"));
        }
        if c.study == Study::Manufactured && !(c.width > 0.0) {
            out.push(Diagnostic::error(Some("convergence.width".into()), "width must be positive"));
        }
        check_solve(&mut out, "convergence", &SolveConfig { p: c.p, theta: c.theta }, pb);
    }
    out
}

/// Parse plus semantic checks, with line pointers filled in.
pub fn validate(text: &str, kind: Option<Experiment>) -> (Option<ExperimentConfig>, Vec<Diagnostic>) {
    match parse(text) {
        Err(d) => (None, vec![d]),
        Ok(cfg) => {
            let diags = check(&cfg, kind)
                .into_iter()
                .map(|mut d| {
                    d.line = d.field.as_deref().and_then(|f| locate(text, f));
                    d
                })
                .collect();
            (Some(cfg), diags)
        }
    }
}

pub fn regime_str(r: Option<Regime>) -> &'static str {
    r.map_or("", |r| r.as_str())
}
