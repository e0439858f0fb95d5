use std::path::PathBuf;

use packet_entropy::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("config: {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("output: {0}")]
    Write(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("at r={r}, theta={theta}: {source}")]
    AtPoint {
        r: f64,
        theta: f64,
        source: CoreError,
    },

    #[error("non-finite {column} at r={r}, theta={theta}, t={t}")]
    NonFinite {
        column: &'static str,
        r: f64,
        theta: f64,
        t: f64,
    },

    #[error("{failed} validation check(s) failed")]
    ValidationFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } | CliError::Write(_) | CliError::Csv(_) => {
                EXIT_CONFIG
            }
            CliError::Core(e) | CliError::AtPoint { source: e, .. } => core_exit_code(e),
            CliError::NonFinite { .. } => EXIT_NUMERICAL,
            CliError::ValidationFailed { .. } => EXIT_VALIDATION,
        }
    }
}

/// Parameter and parse problems are the user's to fix; the rest is numerical.
fn core_exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::InvalidParameter(_)
        | CoreError::OverdampedUnsupported { .. }
        | CoreError::Parse(_)
        | CoreError::ModelEvaluation(packet_entropy::hamparse::EvalError::UnboundParameter(_)) => {
            EXIT_CONFIG
        }
        _ => EXIT_NUMERICAL,
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
