//! Crate-wide error type.

/// Errors shared by all pipeline stages.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero polynomial has no root set")]
    ZeroPolynomial,
    #[error(
        "root finding did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    RootsDiverged { iterations: usize, residual: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("singular matrix in {0}")]
    Singular(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("pipeline bug: {0}")]
    PipelineBug(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
