use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unknown label `{0}`")]
    Lookup(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("quantum certainty fails for `{label}` (worst deviation {deviation:e})")]
    CertaintyViolation { label: String, deviation: f64 },

    #[error("model is not reciprocal for pair ({psi}, {phi})")]
    NonReciprocalModel { psi: String, phi: String },

    #[error("pair ({psi}, {phi}) is orthogonal; degree of epistemicity undefined")]
    OrthogonalPair { psi: String, phi: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Born rule not reproduced: worst pair ({psi}, {phi}) residual {residual:e}")]
    BornViolation {
        psi: String,
        phi: String,
        residual: f64,
    },

    #[error("synthesis failed after {iterations} iterations (best residual {best_residual:e}): {reason}")]
    SynthesisFailure {
        iterations: usize,
        best_residual: f64,
        reason: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
