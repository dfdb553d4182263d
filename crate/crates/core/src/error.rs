use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Invalid physical parameters or an inconsistent request.
    #[error("configuration error: {0}")]
    Config(String),
    /// A precondition of an operation does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Malformed input data such as an unsorted or too short table.
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! config_err {
    ($($arg:tt)*) => {
        $crate::Error::Config(alloc::format!($($arg)*))
    };
}
pub(crate) use config_err;
