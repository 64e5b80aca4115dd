use thiserror::Error;

/// Errors raised by the numerical kernels and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("both rotation inputs are zero")]
    DegenerateRotation,

    #[error("factor update produced a non-finite value at column {column}")]
    UpdateFailure { column: usize },

    #[error("triangular factor is singular at diagonal {index}")]
    SingularFactor { index: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("curvature condition rejected the update (yᵀs = {sy:e})")]
    CurvatureRejected { sy: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shifted solve failed: {0}")]
    SolveFailure(&'static str),

    #[error("unknown problem `{0}`")]
    ProblemNotFound(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
