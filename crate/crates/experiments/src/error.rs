use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    /// Process exit code: 2 for configuration/output problems, 3 for numerics.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Output(_) => 2,
            Error::Numeric(_) => 3,
        }
    }
}

impl From<localdiss::Error> for Error {
    fn from(e: localdiss::Error) -> Self {
        match e {
            localdiss::Error::Numeric(m) => Error::Numeric(m),
            other => Error::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
