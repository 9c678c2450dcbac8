use std::fmt;
use std::io;
use std::path::PathBuf;

use kinvlasov_core::ConfigViolation;

/// A validation failure tied to the config line that set the key, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedViolation {
    pub violation: ConfigViolation,
    /// `None` when the value came from a default.
    pub line: Option<usize>,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{} at line {line}", self.violation),
            None => write!(f, "{} (default value)", self.violation),
        }
    }
}

fn list(violations: &[LocatedViolation]) -> String {
    violations.iter().map(|v| format!("\n  {v}")).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("duplicate key `{key}` in [{section}] at lines {first} and {second}")]
    DuplicateKey {
        section: String,
        key: String,
        first: usize,
        second: usize,
    },

    #[error("missing section [{0}]")]
    MissingSection(&'static str),

    #[error("invalid configuration:{}", list(.0))]
    Invalid(Vec<LocatedViolation>),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: line {line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("solver failed at step {step}: {source}")]
    Solver {
        step: u64,
        #[source]
        source: kinvlasov_core::Error,
    },

    #[error(transparent)]
    Core(#[from] kinvlasov_core::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
