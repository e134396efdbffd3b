use thiserror::Error;
use twobarrier_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Wraps a core error with the step that raised it.
    pub fn from_core(context: &str, e: CoreError) -> CliError {
        match e {
            CoreError::InvalidSystem(_) | CoreError::Domain(_) => CliError::Config(format!("{context}: {e}")),
            CoreError::Numerical(_) | CoreError::UnderResolved { .. } => CliError::Numerical(format!("{context}: {e}")),
        }
    }
}
