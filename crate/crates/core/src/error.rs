use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("{0} is not a level value of the quantizer")]
    InvalidLevel(f64),
    #[error("unsupported signal model: {0}")]
    UnsupportedModel(&'static str),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid config: {0}")]
    Config(String),
}

impl From<std::io::Error> for QcsError {
    fn from(e: std::io::Error) -> Self {
        QcsError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QcsError>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(QcsError::DimensionMismatch { expected, got })
    }
}
