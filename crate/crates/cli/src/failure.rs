use std::fmt;
use std::process::ExitCode;

use strongdamp::Error;

/// A failed run, grouped by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid configuration (exit 2).
    Config(String),
    /// The solver or a closed form gave up (exit 3).
    Numerical(String),
    /// The run finished but a checked property does not hold (exit 4).
    Verification(String),
    /// Output could not be written (exit 1).
    Output(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Output(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Verification(_) => 4,
        })
    }

    /// Any error raised while reading the config or building its inputs.
    pub fn config(e: impl fmt::Display) -> Self {
        Failure::Config(e.to_string())
    }
}

fn numerical(e: &Error) -> bool {
    match e {
        Error::StepSizeUnderflow { .. } | Error::NonFinite { .. } => true,
        Error::Mode { source, .. } => numerical(source),
        _ => false,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if numerical(&e) {
            Failure::Numerical(e.to_string())
        } else if matches!(e, Error::Io(_)) {
            Failure::Output(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

pub type Outcome = Result<(), Failure>;
