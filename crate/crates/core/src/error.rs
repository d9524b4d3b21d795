use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("complex must contain at least one simplex")]
    EmptyInput,

    #[error("simplex lists vertex {0} more than once")]
    DuplicateVertex(u64),

    #[error("simplex {0:?} is not in the complex")]
    SimplexNotFound(Vec<u64>),

    #[error("complex is not pure: {0} is not a face of any top-dimensional simplex")]
    NotPure(String),

    #[error("degree {degree} out of range (valid: {min}..={max})")]
    DegreeOutOfRange { degree: usize, min: usize, max: usize },

    #[error("cochain degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("cochain has {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),

    #[error(
        "numerical kernel dimension {numerical} disagrees with rank computation {exact} at tolerance {tolerance:e}"
    )]
    KernelMismatch { numerical: usize, exact: usize, tolerance: f64 },

    #[error("simplices {0:?} and {1:?} are not connected by any gallery")]
    Unfillable(Vec<u64>, Vec<u64>),

    #[error("filling boundary does not match the given boundary")]
    BoundaryMismatch,

    #[error("boundary is not closed")]
    OpenBoundary,

    #[error("multi-index enumeration too large: m = {m}, k = {k} (limits m <= {max_m}, k <= {max_k})")]
    MultiIndexTooLarge { m: usize, k: usize, max_m: usize, max_k: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("complex lacks a complete {0}-skeleton")]
    IncompleteSkeleton(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("bound undefined: {0}")]
    BoundUndefined(String),

    #[error("vertex {0} has no embedded image")]
    MissingVertex(u64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
