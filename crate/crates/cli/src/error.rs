use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const CONVERGED: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const MAX_ITERS: i32 = 2;
    pub const DIVERGED: i32 = 3;
    pub const VERIFY_FAILED: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Run(#[from] unionavg::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Config error attributed to a dotted field path.
    pub fn field(path: impl AsRef<str>, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {err}", path.as_ref()))
    }

    pub fn context(self, source: &str) -> Self {
        match self {
            CliError::Config(msg) => CliError::Config(format!("{source}: {msg}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit::CONFIG
    }
}
