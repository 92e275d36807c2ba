use thiserror::Error;

/// Errors raised by the exact and numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_{conductor})")]
    DivisionByZero { conductor: u32 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The intersection matrix has a vanishing denominator.
    #[error("intersection matrix undefined: {condition}")]
    IntersectionUndefined { condition: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("series did not converge within total degree {max_degree}")]
    NoConvergence { max_degree: usize },

    #[error("gamma function pole at {0}")]
    GammaPole(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no integer model for n = {0}")]
    UnsupportedModel(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
