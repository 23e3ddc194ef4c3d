use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list is empty")]
    EmptyInput,

    #[error("vertex {0} has degree zero")]
    ZeroDegree(usize),

    #[error("graph has no edges")]
    NoEdges,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("requested {k} eigenpairs of a {n}x{n} matrix")]
    EigenCount { k: usize, n: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("eigendecomposition did not converge")]
    EigenFailed,

    #[error("infeasible model parameters: {0}")]
    Infeasible(String),

    #[error("metric undefined: {0}")]
    Undefined(String),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
