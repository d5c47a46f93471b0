use std::fmt;

/// A failed command, split by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed spec files, inapplicable requests.
    Usage(String),
    /// The solver, a check or an audit ran and failed.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<starfw::Error> for CliError {
    fn from(e: starfw::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}
