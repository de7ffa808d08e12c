use std::path::PathBuf;

use thiserror::Error;

/// Failures of a run, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("numerical guard tripped: {0}")]
    Guard(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Guard(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<wavekin_core::Error> for CliError {
    fn from(e: wavekin_core::Error) -> Self {
        use wavekin_core::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::LatticeMismatch
            | E::StepTooLarge { .. }
            | E::OffGrid { .. }
            | E::TimeMismatch { .. } => CliError::Validation(e.to_string()),
            E::NonFinite(_)
            | E::WorkGuard { .. }
            | E::BlowUp { .. }
            | E::NegativeDensity { .. }
            | E::NoConvergence { .. }
            | E::DegenerateDiagram(_)
            | E::PhaseResidue(_) => CliError::Guard(e.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
