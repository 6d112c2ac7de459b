use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {field}: {message}")]
    Config { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(noon_core::Error),
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 for configuration errors, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<noon_core::Error> for CliError {
    fn from(e: noon_core::Error) -> Self {
        use noon_core::Error as E;
        match e {
            E::InvalidState(msg) => CliError::config("state", msg),
            E::InvalidParameter { name, reason } => CliError::config(name, reason),
            E::CutoffExceeded { requested, cutoff } => CliError::config(
                "m",
                format!("order {requested} exceeds the state cutoff {cutoff}"),
            ),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
