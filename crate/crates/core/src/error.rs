use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Bad arguments: empty inputs, out-of-range strengths, non-primes, ...
    #[error("usage error: {0}")]
    Usage(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    Capacity { what: &'static str, needed: u128, limit: u128 },

    /// The factor orders do not match any supported construction case.
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    /// Symbol sets of an array do not agree with the groups supplied.
    #[error("symbol/group mismatch: {0}")]
    Mismatch(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("catalog row {row} ({design}): {message}")]
    Catalog { row: usize, design: String, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
