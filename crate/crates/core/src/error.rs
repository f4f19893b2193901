use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// reported to a user without a backtrace.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precision exhausted: need {needed} digits, have {available}")]
    Precision { needed: u32, available: u32 },

    #[error("element is not integral")]
    NonIntegral,

    #[error("element is not a unit")]
    NotUnit,

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("relation violated: {0}")]
    Relation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undecidable at working precision: {0}")]
    Undecidable(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("needs extension: {0}")]
    NeedsExtension(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("{line}:{column}: {message}")]
    Spec {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
