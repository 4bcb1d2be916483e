//! Request and response documents of the HTTP API. Every document carries
//! `format_version`; see `docs/api.md`.

use codeattn_core::session::{Label, SessionRecord};
use codeattn_core::{InteractionEvent, Token};
use serde::{Deserialize, Serialize};

pub const API_FORMAT_VERSION: u32 = 1;

fn version() -> u32 {
    API_FORMAT_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterRequest {
    pub format_version: u32,
    /// Optional caller-chosen id; a random token is issued otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    #[serde(default = "version")]
    pub format_version: u32,
    pub participant_id: String,
    pub tasks: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    Open,
    Submitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub snippet_id: String,
    pub source: String,
    pub buggy_line: usize,
    pub description: String,
    /// Tokens the client must use for window computation.
    pub tokens: Vec<Token>,
    pub status: TaskStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_token: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskList {
    #[serde(default = "version")]
    pub format_version: u32,
    pub participant_id: String,
    pub guidance_minutes: u32,
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSessionRequest {
    pub format_version: u32,
    pub participant_id: String,
    pub snippet_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    #[serde(default = "version")]
    pub format_version: u32,
    pub session_token: String,
    pub participant_id: String,
    pub snippet_id: String,
    /// True when an already open session was returned.
    pub resumed: bool,
    pub persisted_events: usize,
    pub last_timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventBatch {
    pub format_version: u32,
    pub events: Vec<InteractionEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    #[serde(default = "version")]
    pub format_version: u32,
    pub accepted: usize,
    pub persisted_events: usize,
    pub last_timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitRequest {
    pub format_version: u32,
    pub label: Label,
    /// Required for `fix_done`; `cannot_fix` keeps the original line when absent.
    #[serde(default)]
    pub final_buggy_line: Option<String>,
    #[serde(default)]
    pub external_source: bool,
    /// Client-relative end of the session; defaults to the server-measured
    /// elapsed time, never earlier than the last event.
    #[serde(default)]
    pub submitted_at_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submitted {
    #[serde(default = "version")]
    pub format_version: u32,
    pub record: SessionRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    #[serde(default = "version")]
    pub format_version: u32,
    pub error: String,
    pub message: String,
}
