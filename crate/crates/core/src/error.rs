use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parity-odd operator not representable in a parity sector: {0}")]
    ParityOdd(String),

    #[error("{what} = {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("LAPACK routine {routine} failed (info = {info})")]
    Lapack { routine: &'static str, info: i32 },

    #[error("maximum at window edge t = {t}; widen the window")]
    EdgeMaximum { t: f64 },

    #[error("fitted log slope a = {a} is not positive: no divergence")]
    NoDivergence { a: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::ParityOdd(_)
            | Error::Config(_) => 2,
            Error::Numerical(_)
            | Error::Lapack { .. }
            | Error::EdgeMaximum { .. }
            | Error::NoDivergence { .. } => 3,
            Error::CapExceeded { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
