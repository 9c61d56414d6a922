use std::io;

use thiserror::Error;

/// Failure to decode one of the binary interchange files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported version {0}")]
    BadVersion(u32),
    #[error("truncated payload")]
    Truncated,
    #[error("{what} tag out of range: {value}")]
    TagOutOfRange { what: &'static str, value: u32 },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl FormatError {
    /// Stable numeric code, distinct per variant.
    pub fn code(&self) -> u32 {
        match self {
            FormatError::BadMagic { .. } => 1,
            FormatError::BadVersion(_) => 2,
            FormatError::Truncated => 3,
            FormatError::TagOutOfRange { .. } => 4,
            FormatError::Validation(_) => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum TatError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("unsupported conversion: {0}")]
    UnsupportedConversion(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("format error: {0}")]
    Format(#[from] FormatError),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(io::Error),
}

impl From<io::Error> for TatError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            TatError::Format(FormatError::Truncated)
        } else {
            TatError::Io(e)
        }
    }
}

pub type Result<T, E = TatError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> TatError {
    TatError::InvalidArgument(msg.into())
}
