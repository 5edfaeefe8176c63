//! Scenario configuration, execution and artifact emission.

mod artifacts;
mod config;
mod runner;

pub use artifacts::{format_value, series_csv, ArtifactDir, LogLogPlot, SlopeGuide};
pub use config::{
    parse_config, GridConfig, LinearConfig, NonlinearConfig, ParamsConfig, PressureConfig, ScenarioConfig,
    ScenarioKind, SymbolsConfig,
};
pub use runner::{
    load_sweep, run_scenario, run_sweep, Manifest, Outcome, SweepConfig, SweepEntry, MONOTONE_SLACK,
    NONLINEAR_DRIFT_TOL, NONLINEAR_SYMMETRY_TOL,
};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::nonlinear::NonlinearError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ConfigError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Nonlinear(#[from] NonlinearError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl RunError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
