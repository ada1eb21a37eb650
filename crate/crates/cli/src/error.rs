use std::io;

use qwire::WireError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config keys or values.
    #[error("{0}")]
    Usage(String),
    /// An invariant or integrator check failed.
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Wire(_) | CliError::Io(_) => 2,
        }
    }
}
