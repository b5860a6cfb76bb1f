use std::fmt;
use std::process::ExitCode;

use pulsecell::Error;

/// Error surfaced by a subcommand, carrying its process exit status.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Unstable(String),
    Io(String),
    ChecksFailed { failed: usize, total: usize },
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::ChecksFailed { .. } => 1,
            Failure::Config(_) => 2,
            Failure::Unstable(_) => 3,
            Failure::Io(_) => 4,
        })
    }

    pub fn io(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        Failure::Io(format!("{context}: {err}"))
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Unstable { .. }
            | Error::Positivity(_)
            | Error::InvalidDensity(_)
            | Error::BlockStructure(_)
            | Error::EigenNoConvergence(_) => Failure::Unstable(err.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "{m}"),
            Failure::Unstable(m) => write!(f, "integration failed: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::ChecksFailed { failed, total } => write!(f, "{failed} of {total} criteria failed"),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;
