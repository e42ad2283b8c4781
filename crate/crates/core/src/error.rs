use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} outside table range [{first}, {last}]")]
    OutOfRange { index: i64, first: i64, last: i64 },

    /// The enclosure at the current working precision does not decide the
    /// question. Callers retry at a higher precision.
    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("precision cap of {cap} digits exhausted: {reason}")]
    PrecisionExhausted { cap: u32, reason: String },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("no convergent with positive epsilon among {attempts} candidates")]
    NoPositiveEpsilon { attempts: usize },

    #[error("checksum mismatch in {0}")]
    Checksum(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision(_))
    }
}
