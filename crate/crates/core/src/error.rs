use thiserror::Error;

/// Errors shared across the crate.
///
/// Preconditions that reject an input are distinguished from internal
/// verification failures: the first means the caller handed us something the
/// theory does not cover, the second means a construction finished but its
/// self-check did not come back clean.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grade mismatch: {0}")]
    GradeMismatch(String),

    #[error("degenerate simplex: {0}")]
    DegenerateSimplex(String),

    #[error("precondition rejected: {0}")]
    Precondition(String),

    #[error("internal verification failed: {0}")]
    InternalVerification(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
