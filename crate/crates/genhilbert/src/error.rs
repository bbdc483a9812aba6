use thiserror::Error;

/// Errors surfaced by measure construction, quadrature and operator routes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("transform produces a non-integrable density: {0}")]
    NonIntegrable(String),

    #[error("truncation insufficient to certify the result: {0}")]
    TruncationInsufficient(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("requested size {requested} exceeds available table length {available}")]
    SizeExceeded { requested: usize, available: usize },

    #[error("operator not defined on input at this truncation: {0}")]
    OperatorUndefined(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
