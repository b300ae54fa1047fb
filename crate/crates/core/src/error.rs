use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Guard violations carry the offending value together with the closest
/// admissible one so that callers can report them verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mollifier under-resolved at eps = {eps}: the kernel needs eps >= {min_eps} on this grid")]
    UnderResolved { eps: f64, min_eps: f64 },

    #[error("time step {dt} exceeds the step-resolution guard {max_dt}; try dt = {suggested}")]
    StepTooLarge { dt: f64, max_dt: f64, suggested: f64 },

    #[error("test function does not vanish at the final time (|phi(T)| = {value})")]
    TestFunctionSupport { value: f64 },

    #[error("perturbation plan does not converge in L1: field gaps {field_gaps:?}, divergence gaps {div_gaps:?}")]
    PremiseViolated { field_gaps: Vec<f64>, div_gaps: Vec<f64> },

    #[error("non-positive modulus value {value} at t = {t}")]
    NonPositiveModulus { t: f64, value: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
