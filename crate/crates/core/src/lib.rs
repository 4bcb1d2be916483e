//! Token-level attention capture and comparison for single-line bug fixing.
//!
//! The crate is organised bottom-up:
//!
//! - [`code`]: lexing Java-like snippets into classified tokens with line structure.
//! - [`session`]: the interaction-event log of the blurred editor, visibility
//!   timelines, and the derivation of developer attention from a session.
//! - [`model`]: ingestion of neural-model attention dumps and their reduction
//!   to one weight per token.
//! - [`analysis`]: rank correlation, divergence, attention shares, distance from
//!   uniformity, temporal profiles and the window-size simulation.
//! - [`report`]: cohort-level orchestration producing tabular report files.
//! - [`synth`]: protocol-valid synthetic sessions for fuzzing and demos.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at the
//! crate root pin the `f64` instantiation used by the CLI and service.

pub mod analysis;
pub mod attention;
pub mod code;
pub mod io;
pub mod model;
pub mod report;
mod scalar;
pub mod session;
pub mod synth;

pub use attention::{AttentionError, AttentionVector};
pub use code::{Corpus, LexError, Snippet, Token, TokenClass};
pub use scalar::Scalar;
pub use session::{InteractionEvent, SessionRecord};

/// Attention vector over `f64` weights.
pub type AttentionVectorF64 = AttentionVector<f64>;
/// Attention vector over `f32` weights.
pub type AttentionVectorF32 = AttentionVector<f32>;
/// Model attention dump with `f64` weights.
pub type ModelAttentionDumpF64 = model::ModelAttentionDump<f64>;
/// Correlation result over `f64`.
pub type CorrelationF64 = analysis::Correlation<f64>;
/// Temporal profile over `f64`.
pub type TemporalProfileF64 = analysis::TemporalProfile<f64>;
