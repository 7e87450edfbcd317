use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An image or probe failed validation. `at` is the first offending pixel, if any.
    #[error("validation error{}: {message}", at.map(|(x, y)| format!(" at ({x}, {y})")).unwrap_or_default())]
    Validation {
        message: String,
        at: Option<(usize, usize)>,
    },

    /// Incompatible shapes, e.g. a probe that does not fit inside the image.
    #[error("size error: {0}")]
    Size(String),

    /// Malformed PGM or ASPF input.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A raster cannot be represented in the requested output format.
    #[error("encode error: {0}")]
    Encode(String),

    /// The direct and gradient maps disagree by more than the allowed tolerance.
    #[error("equivalence check failed: max discrepancy {discrepancy:e} exceeds {tolerance:e}")]
    Equivalence { discrepancy: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn validation(message: impl Into<String>, at: Option<(usize, usize)>) -> Self {
        Error::Validation {
            message: message.into(),
            at,
        }
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
