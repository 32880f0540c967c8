use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index must be at least 1")]
    ZeroIndex,

    #[error("coefficient for index {index} is beyond the declared bound 2^{bound_rank}")]
    InsufficientCoefficients { index: String, bound_rank: u32 },

    #[error("rank {have} is too small, need at least {need}")]
    RankTooSmall { have: u32, need: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed specification: {0}")]
    Malformed(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("quasimeasure vanishes on the starting cube")]
    ZeroMass,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
