use thiserror::Error;

/// Errors raised by the cubature pipeline.
///
/// Configuration and domain problems are distinguished from numerical
/// precondition failures so front ends can report them differently.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resolution too high for dimension {dim}: {resolution}^{dim} cells")]
    ResolutionOverflow { resolution: usize, dim: usize },

    #[error("no interior point found in cube {cube:?}")]
    NoInteriorPoint { cube: Vec<i64> },

    #[error("exponent p = {p} must exceed the dimension d = {d}")]
    ExponentTooSmall { p: f64, d: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of numerical preconditions (as opposed to bad
    /// input or configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoInteriorPoint { .. }
                | Error::ExponentTooSmall { .. }
                | Error::Degenerate(_)
                | Error::Precondition(_)
                | Error::ResolutionOverflow { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
