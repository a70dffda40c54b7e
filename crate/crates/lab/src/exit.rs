//! Error kinds of the command-line tool and their exit codes.

use std::process::ExitCode;

use superbroad_core::Error as CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Failure = 1,
    Usage = 2,
    Constraint = 3,
    Numeric = 4,
    /// Finished, but a reported width is only a bound.
    Clipped = 5,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
}

impl LabError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        LabError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit(&self) -> Exit {
        match self {
            LabError::Usage(_) | LabError::Format { .. } => Exit::Usage,
            LabError::Io { .. } => Exit::Failure,
            LabError::Core(e) => core_exit(e),
        }
    }
}

fn core_exit(e: &CoreError) -> Exit {
    use CoreError::*;
    match e {
        DurationExceeded { .. } | AmplitudeExceeded { .. } | Unphysical { .. } | InvalidProfile(_) => {
            Exit::Constraint
        }
        NonFinite { .. } | NormDrift { .. } | NotConverged { .. } | DegeneratePoint | AsymptoticUndefined => {
            Exit::Numeric
        }
        Cell { source, .. } => core_exit(source),
        _ => Exit::Usage,
    }
}
