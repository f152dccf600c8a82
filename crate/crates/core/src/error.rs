use thiserror::Error;

use crate::imageio::PgmError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field dimensions {0}x{1} are invalid")]
    InvalidDimensions(usize, usize),

    #[error("data length {len} does not match {height}x{width}")]
    LengthMismatch {
        height: usize,
        width: usize,
        len: usize,
    },

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("non-finite value in {stage} at iteration {iteration}")]
    NonFinite {
        stage: &'static str,
        iteration: usize,
    },

    #[error(transparent)]
    Pgm(#[from] PgmError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
