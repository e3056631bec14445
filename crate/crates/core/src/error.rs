use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("output symbol {symbol} is not in the alphabet of {channel}")]
    AlphabetMismatch { channel: String, symbol: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("ensemble ({l},{k}) with N={n}: N*l must be divisible by k")]
    Divisibility { l: usize, k: usize, n: usize },

    #[error("malformed alist (line {line}): {reason}")]
    Alist { line: usize, reason: String },

    #[error("malformed DIMACS CNF (line {line}): {reason}")]
    Dimacs { line: usize, reason: String },

    #[error("code too large for exhaustive enumeration: dimension {dimension} > {limit}")]
    CodeTooLarge { dimension: usize, limit: usize },

    #[error("formula is unsatisfiable")]
    Unsatisfiable,

    #[error("contradictory evidence: message into variable {variable} vanished")]
    Contradiction { variable: usize },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("no sign change of the growth rate found in (0, 1/2)")]
    NoGap,

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
