use thiserror::Error;

/// Errors produced anywhere in the period-search pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("http status {status} fetching {url}")]
    Http { status: u16, url: String },
    #[error("offline and not cached: {0}")]
    Offline(String),
    #[error("serialization: {0}")]
    Serialization(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 1 usage, 2 data, 3 numerical/degenerate.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 1,
            Error::DegenerateInput(_) | Error::DegenerateFit(_) => 3,
            Error::InsufficientData(_)
            | Error::Parse { .. }
            | Error::Http { .. }
            | Error::Offline(_)
            | Error::Serialization(_)
            | Error::Io(_) => 2,
        }
    }

    /// True for errors that mark a single trial period as undefined rather
    /// than aborting a whole scan.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateInput(_) | Error::DegenerateFit(_) | Error::InsufficientData(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
