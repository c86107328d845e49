use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const LIMITS: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse { source_name: String, line: usize, column: usize, message: String },
    #[error("{source_name}: {message}")]
    Document { source_name: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] vk_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use vk_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Document { .. } | CliError::Usage(_) => exit::PARSE,
            CliError::Core(E::Capability(_) | E::Resource(_) | E::Precondition(_)) => exit::LIMITS,
            CliError::Core(_) => exit::PARSE,
            CliError::Io { .. } | CliError::Verification(_) => exit::FAILURE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
