use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(i64),
    #[error("lower parameter {0} is a non-positive integer")]
    LowerPole(String),
    #[error("hypergeometric spec needs at least one upper and one lower parameter")]
    EmptySpec,
    #[error("series did not reach the requested precision within {0} terms")]
    TermCap(usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("bad field spec: {0}")]
    Field(String),
    #[error("bad sprinkle file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
