use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{failed} of {total} points did not converge")]
    NotConverged { failed: usize, total: usize },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::NotConverged { .. } => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<eosvac_core::Error> for CliError {
    fn from(e: eosvac_core::Error) -> Self {
        match e {
            eosvac_core::Error::Config(m) | eosvac_core::Error::Precondition(m) => CliError::Config(m),
            eosvac_core::Error::Data(m) => CliError::Data(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}
