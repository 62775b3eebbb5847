use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset} (expected x1, x2 or x3)")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("capacity exceeded: {what} = {requested} (limit {limit})")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("index {index} out of range for level {level}")]
    IndexOutOfRange { level: u32, index: usize },

    #[error("quadrature rule under-resolved: {0}")]
    UnderResolved(String),

    #[error("symbol is not real-valued")]
    NotReal,

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("level {0} too small for this operation")]
    LevelTooSmall(u32),

    #[error("insufficient data for a rate fit: {0}")]
    InsufficientData(String),

    #[error("calibration ambiguous: {0}")]
    CalibrationAmbiguous(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
