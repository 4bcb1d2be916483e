//! Study back end for the blurred bug-fixing editor: participant
//! registration, balanced task assignment, validated event ingestion and
//! durable, append-only session storage, behind a small HTTP API.

pub mod api;
mod assign;
mod config;
mod error;
pub mod http;
mod service;
pub mod store;

pub use assign::Assigner;
pub use config::{AssignmentPolicy, StudyConfig};
pub use error::ServiceError;
pub use service::StudyService;
