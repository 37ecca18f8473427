//! Both sides of the a priori estimates, θ and λ sweeps, and the
//! gauge and dilation invariance checks.

mod elliptic;
mod invariance;
mod parabolic;
mod report;
mod sweep;

pub use elliptic::{data_norms, estimate_ratio_elliptic, estimate_ratio_exact, estimate_ratio_fd, solution_norms};
pub use invariance::{gauge_invariance_check, scaling_invariance_check, InvarianceCheck, InvarianceReport, EXACT_TOL, FD_CONSTANT};
pub use parabolic::estimate_ratio_parabolic;
pub use report::{estimate_ratio, EstimateReport, SolverKind};
pub use sweep::{
    default_lambdas, lambda_sweep, theta_lattice, theta_sweep, EndpointApproach, SweepResult, APPROACH_EPS, BLOWUP_FACTOR,
    ENDPOINT_EXCLUSION, LAMBDA_PLATEAU, THETA_MARGIN, THETA_STEP,
};
