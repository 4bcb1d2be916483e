//! Append-only, line-delimited session log.
//!
//! One JSON document per line, each carrying `format_version` and an `entry`
//! tag:
//!
//! ```text
//! {"format_version":1,"entry":"open","session_token":"…","participant_id":"p1","snippet_id":"gcd","opened_unix_ms":…}
//! {"format_version":1,"entry":"event","received_unix_ms":…,"timestamp_ms":120,"kind":"unblur","focus_token":4,"visible_tokens":[1,2,3,4,5,6,7]}
//! {"format_version":1,"entry":"submit","label":"fix_done","final_buggy_line":"…","validity":"valid","submitted_at_ms":90000,"received_unix_ms":…}
//! ```
//!
//! A log without a `submit` line is an open session.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{InteractionEvent, Label, SessionError, SessionRecord, Validity, SESSION_FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("log line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("log line {line}: unsupported format_version {version}")]
    Version { line: usize, version: u32 },
    #[error("log line {line}: {reason}")]
    Structure { line: usize, reason: String },
    #[error(transparent)]
    Record(#[from] SessionError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum LogEntry {
    Open {
        session_token: String,
        participant_id: String,
        snippet_id: String,
        #[serde(default)]
        opened_unix_ms: u64,
    },
    Event {
        #[serde(default)]
        received_unix_ms: u64,
        #[serde(flatten)]
        event: InteractionEvent,
    },
    Submit {
        label: Label,
        final_buggy_line: String,
        validity: Validity,
        submitted_at_ms: u64,
        #[serde(default)]
        received_unix_ms: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub format_version: u32,
    #[serde(flatten)]
    pub entry: LogEntry,
}

impl LogLine {
    pub fn new(entry: LogEntry) -> Self {
        Self {
            format_version: SESSION_FORMAT_VERSION,
            entry,
        }
    }

    /// Serialised form, without the trailing newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("log lines serialise")
    }
}

/// A parsed log: header, accepted events and the submission if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub session_token: String,
    pub participant_id: String,
    pub snippet_id: String,
    pub opened_unix_ms: u64,
    pub events: Vec<InteractionEvent>,
    pub submission: Option<SessionRecord>,
}

impl SessionLog {
    pub fn is_open(&self) -> bool {
        self.submission.is_none()
    }

    /// Parses a log. A torn final line (no trailing newline, unparsable) is
    /// ignored, since it was never acknowledged.
    pub fn parse(text: &str) -> Result<Self, LogError> {
        let torn_tail = !text.is_empty() && !text.ends_with('\n');
        let lines: Vec<&str> = text.lines().collect();
        let mut header = None;
        let mut events = Vec::new();
        let mut submission = None;
        for (i, raw) in lines.iter().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let parsed: LogLine = match serde_json::from_str(raw) {
                Ok(p) => p,
                Err(_) if torn_tail && i + 1 == lines.len() => break,
                Err(source) => return Err(LogError::Parse { line, source }),
            };
            if parsed.format_version != SESSION_FORMAT_VERSION {
                return Err(LogError::Version {
                    line,
                    version: parsed.format_version,
                });
            }
            let structure = |reason: &str| LogError::Structure {
                line,
                reason: reason.to_owned(),
            };
            if submission.is_some() {
                return Err(structure("entry after submit"));
            }
            match parsed.entry {
                LogEntry::Open {
                    session_token,
                    participant_id,
                    snippet_id,
                    opened_unix_ms,
                } => {
                    if header.is_some() {
                        return Err(structure("duplicate open entry"));
                    }
                    header = Some((session_token, participant_id, snippet_id, opened_unix_ms));
                }
                LogEntry::Event { event, .. } => {
                    if header.is_none() {
                        return Err(structure("event before open entry"));
                    }
                    events.push(event);
                }
                LogEntry::Submit {
                    label,
                    final_buggy_line,
                    validity,
                    submitted_at_ms,
                    ..
                } => {
                    let (_, participant_id, snippet_id, _) =
                        header.as_ref().ok_or_else(|| structure("submit before open entry"))?;
                    submission = Some(SessionRecord::new(
                        snippet_id.clone(),
                        participant_id.clone(),
                        events.clone(),
                        label,
                        final_buggy_line,
                        validity,
                        submitted_at_ms,
                    )?);
                }
            }
        }
        let (session_token, participant_id, snippet_id, opened_unix_ms) =
            header.ok_or_else(|| LogError::Structure {
                line: 1,
                reason: "missing open entry".into(),
            })?;
        Ok(Self {
            session_token,
            participant_id,
            snippet_id,
            opened_unix_ms,
            events,
            submission,
        })
    }
}
