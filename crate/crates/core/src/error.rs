use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The byte stream is not a CSCN container (bad magic or version).
    #[error("format error: {0}")]
    Format(String),

    #[error("truncated container: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    /// Non-finite or otherwise unusable sample values.
    #[error("data error: {0}")]
    Data(String),

    #[error("degenerate trace{}: zero energy", position_suffix(*.position))]
    DegenerateTrace { position: Option<(usize, usize)> },

    #[error("degenerate reference: zero energy")]
    DegenerateReference,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("scene configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn position_suffix(position: Option<(usize, usize)>) -> String {
    match position {
        Some((m, n)) => format!(" at grid position ({m}, {n})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn degenerate_at(m: usize, n: usize) -> Self {
        Error::DegenerateTrace {
            position: Some((m, n)),
        }
    }

    /// Attaches a grid position to a position-less degenerate-trace error.
    pub(crate) fn at_position(self, m: usize, n: usize) -> Self {
        match self {
            Error::DegenerateTrace { position: None } => Error::degenerate_at(m, n),
            other => other,
        }
    }
}
