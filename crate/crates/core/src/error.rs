use thiserror::Error;

#[derive(Debug, Error)]
pub enum QpError {
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("arrows do not compose: {0}")]
    NotComposable(String),
    #[error("path is not a cycle: {0}")]
    NotCyclic(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot parse rational `{0}`")]
    Rational(String),
    #[error("quiver mismatch")]
    QuiverMismatch,
    #[error("linear part is not invertible")]
    NotInvertible,
    #[error("truncation ceiling reached: {0}")]
    Ceiling(String),
    #[error("path enumeration exceeds the limit of {0} paths")]
    TooManyPaths(usize),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QpError>;
