//! Experiment harness: TOML configs, shipped scenarios, orchestration and
//! report files for the `qcommit` simulator.

pub mod config;
pub mod experiment;
pub mod output;
pub mod scenarios;

use std::path::PathBuf;

use qcommit::spacetime::Violation;
use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentKind, Format, Resolved};
pub use experiment::{run_experiment, Check, RunOutput, RunStatus, RUN_SCHEMA};
pub use scenarios::{list_scenarios, load_config, ShippedScenario, SCENARIOS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid config field `{field}`: {reason}")]
    Field { field: String, reason: String },

    #[error("unknown scenario `{name}`; valid names: {}", valid.join(", "))]
    UnknownScenario { name: String, valid: Vec<&'static str> },

    #[error("causally invalid schedule: {}", violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Causal { violations: Vec<Violation> },

    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Field { field: field.into(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 I/O, 2 configuration, 3 causal abort, 4 invariant breach.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) | CliError::Field { .. } | CliError::UnknownScenario { .. } => 2,
            CliError::Causal { .. } => 3,
            CliError::Run(_) => 4,
        }
    }
}

impl From<qcommit::Error> for CliError {
    fn from(e: qcommit::Error) -> Self {
        match e {
            qcommit::Error::Param { field, reason } => CliError::field(field, reason),
            qcommit::Error::Causal(violations) => CliError::Causal { violations },
            other => CliError::Run(other.to_string()),
        }
    }
}
