//! Batch commands behind the `codeattn` binary. Each command returns its
//! text output so it can be tested without a process boundary.

mod commands;
pub mod manifest;
mod render;

pub use commands::{
    cmd_analyze, cmd_lint_corpus, cmd_replay, cmd_sensitivity, cmd_validate_aoi, AnalyzeOutcome, AoiSpec,
    AoiOutcome, AOI_FORMAT_VERSION,
};
pub use manifest::{Overrides, RunManifest};
pub use render::{heat_rendering, token_weights};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing input; exit code 1.
    #[error("{0}")]
    Input(String),
    /// Anything else; exit code 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<codeattn_core::report::ReportError> for CliError {
    fn from(e: codeattn_core::report::ReportError) -> Self {
        use codeattn_core::report::ReportError as R;
        match e {
            R::Io(_) | R::Csv(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<codeattn_core::io::LoadError> for CliError {
    fn from(e: codeattn_core::io::LoadError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<codeattn_core::code::CorpusError> for CliError {
    fn from(e: codeattn_core::code::CorpusError) -> Self {
        CliError::Input(format!("corpus: {e}"))
    }
}
