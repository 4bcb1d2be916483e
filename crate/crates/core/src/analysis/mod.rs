//! Comparative statistics over attention vectors.

mod correlation;
mod dfu;
mod divergence;
mod sensitivity;
mod shares;
mod temporal;

use thiserror::Error;

use crate::session::SessionError;

pub use correlation::{average_ranks, significance_filter, spearman, spearman_slices, Correlation, Filtered, PValue};
pub use dfu::{dfu, dfu_report, DfuEntry, DfuReport, TokenGroup};
pub use divergence::{jsd, jsd_slices};
pub use sensitivity::{perturb_events, window_sensitivity};
pub use shares::{aoi_share, buggy_line_share, length_context_correlation};
pub use temporal::{temporal_profile, TemporalBin, TemporalProfile, DEFAULT_BINS};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("correlation undefined: an input has constant values")]
    DegenerateInput,
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("attention vector has zero total mass")]
    ZeroMass,
    #[error("token group is empty")]
    EmptyClass,
    #[error("invalid area of interest: {0}")]
    InvalidAoi(String),
    #[error("window size {0} outside 1..=7")]
    InvalidWindow(usize),
    #[error("bin count must be at least 1")]
    InvalidBins,
    #[error("non-finite input value")]
    NonFinite,
    #[error(transparent)]
    Session(#[from] SessionError),
}
