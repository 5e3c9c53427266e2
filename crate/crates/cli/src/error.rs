use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

/// Exit status for validation and numerical failures.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for file-system failures.
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] pwclock_core::Error),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("sweep over `{0}` has no values")]
    NoValues(String),

    #[error("{failed} of {total} sweep runs failed")]
    SweepFailed { failed: usize, total: usize },

    #[error("PWCLOCK_THREADS must be a positive integer, got `{0}`")]
    Threads(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Write { .. } => EXIT_IO,
            _ => EXIT_FAILURE,
        }
    }

    /// Stable identifier of the failure, e.g. `NoValues` or `OverDamped`.
    pub fn kind(&self) -> String {
        match self {
            CliError::Model(e) => variant_name(&format!("{e:?}")),
            CliError::Config(_) => "InvalidConfig".into(),
            CliError::UnknownExperiment(_) => "UnknownExperiment".into(),
            CliError::NoValues(_) => "NoValues".into(),
            CliError::SweepFailed { .. } => "SweepFailed".into(),
            CliError::Threads(_) => "InvalidThreads".into(),
            CliError::Io { .. } | CliError::Write { .. } => "Io".into(),
        }
    }

    /// Machine-readable error object written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}

fn variant_name(debug: &str) -> String {
    debug
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or_default()
        .to_string()
}
