//! Command-line pipeline around `specshape-core`: image codecs, configuration,
//! the reconstruction pipeline and its JSON reports.

pub mod app;
pub mod codec;
pub mod config;
pub mod pipeline;
pub mod report;

use thiserror::Error;

pub use config::{ConfigError, PipelineConfig};
pub use pipeline::{evaluate, run_pipeline};
pub use report::{ReconstructionReport, SpecularityRecord, TruthFile};

/// Process exit status for success, including runs with no detections.
pub const EXIT_OK: i32 = 0;
/// Unreadable or malformed input data.
pub const EXIT_INPUT: i32 = 2;
/// Invalid flags, configuration values or environment.
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<codec::CodecError> for CliError {
    fn from(e: codec::CodecError) -> Self {
        CliError::Input(e.to_string())
    }
}
