use thiserror::Error;

/// Errors raised by the curvature algebra.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("operation requires an almost complex structure J")]
    MissingComplexStructure,

    #[error("invalid almost complex structure: {0}")]
    InvalidComplexStructure(String),

    #[error("the spanned subspace is degenerate (restricted metric has a radical)")]
    DegenerateSubspace,

    #[error("input vectors are linearly dependent")]
    DependentInput,

    #[error("plane is degenerate; sectional curvature undefined")]
    DegeneratePlane,

    #[error("unsupported signature: {0}")]
    UnsupportedSignature(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("bilinear form is not symmetric (residual {0:e})")]
    NotSymmetric(f64),

    #[error("hybrid condition S(x,Jy)+S(y,Jx)=0 violated (residual {0:e})")]
    HybridConditionViolated(f64),

    #[error("tensor is not of Kaehler type (residual {0:e})")]
    NotKaehler(f64),

    #[error("metric is definite; no isotropic vectors exist")]
    DefiniteMetric,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid document: {0}")]
    Document(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
