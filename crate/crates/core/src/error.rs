use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Payloads are rendered to strings so the enum stays independent of the
/// scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid sampled function: {0}")]
    InvalidFunction(String),
    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),
    #[error("cutoff shift range does not cover the support: {0}")]
    CoverageError(String),
    #[error("support violation: {0}")]
    SupportError(String),
    #[error("indicial quadratic has no two distinct real roots (discriminant {discriminant})")]
    DegenerateRoots { discriminant: f64 },
    #[error("weight exponent {theta} sits on a forbidden endpoint {endpoint}")]
    ForbiddenExponent { theta: f64, endpoint: f64 },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureError(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("singular operator at theta={theta}, lambda={lambda}")]
    SingularOperator { theta: f64, lambda: f64 },
    #[error("truncation margin too small: {0}")]
    TruncationError(String),
    #[error("no radius with density {gamma} around t={t}")]
    NoCriticalRadius { t: f64, gamma: f64 },
    #[error("covering stopped at the radius floor with residual measure {residual}")]
    CoverageShortfall { residual: f64 },
    #[error("lemma hypothesis violated at t={t}, R={radius}")]
    HypothesisViolated { t: f64, radius: f64 },
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
