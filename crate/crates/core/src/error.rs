use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground mismatch: {0}")]
    GroundMismatch(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration limit exceeded: n = {n}, limit = {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("split move not applicable: {0}")]
    NotApplicable(String),
    #[error("unsupported measure family: {0}")]
    UnsupportedFamily(String),
    #[error("unsupported ground: {0}")]
    UnsupportedGround(String),
    #[error("singleton tail series is not absolutely convergent: {0}")]
    TailDivergent(String),
    #[error("function is not integrable: {0}")]
    NotIntegrable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
