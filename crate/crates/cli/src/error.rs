use navsim_core::agent::AgentError;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;

/// An error plus the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self::new(EXIT_INPUT, error)
    }
}

/// Anything not classified otherwise is treated as bad input.
impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        Self::input(error)
    }
}

impl From<std::io::Error> for CliError {
    fn from(error: std::io::Error) -> Self {
        Self::input(error)
    }
}

impl From<AgentError> for CliError {
    fn from(error: AgentError) -> Self {
        let code = match &error {
            AgentError::DimensionMismatch { .. } => EXIT_MISMATCH,
            AgentError::NonFiniteLoss { .. } => EXIT_DIVERGED,
            _ => EXIT_INPUT,
        };
        Self::new(code, error)
    }
}
