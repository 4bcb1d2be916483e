use serde::{Deserialize, Serialize};

use super::{InteractionEvent, SessionError};

pub const SESSION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    FixDone,
    CannotFix,
}

/// Whether a session enters the default analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Valid,
    /// The participant reported using an external source.
    ExternalSource,
    Outlier,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::FixDone => "fix_done",
            Label::CannotFix => "cannot_fix",
        }
    }
}

impl Validity {
    pub fn as_str(self) -> &'static str {
        match self {
            Validity::Valid => "valid",
            Validity::ExternalSource => "external_source",
            Validity::Outlier => "outlier",
        }
    }
}

/// A submitted bug-fixing session: who fixed what, the interaction events,
/// and the submission label.
///
/// The session duration is the client-relative submission timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSessionRecord")]
pub struct SessionRecord {
    pub format_version: u32,
    pub snippet_id: String,
    pub participant_id: String,
    pub events: Vec<InteractionEvent>,
    pub label: Label,
    pub final_buggy_line: String,
    pub validity: Validity,
    pub submitted_at_ms: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSessionRecord {
    format_version: u32,
    snippet_id: String,
    participant_id: String,
    events: Vec<InteractionEvent>,
    label: Label,
    final_buggy_line: String,
    validity: Validity,
    submitted_at_ms: u64,
}

impl TryFrom<RawSessionRecord> for SessionRecord {
    type Error = SessionError;

    fn try_from(r: RawSessionRecord) -> Result<Self, Self::Error> {
        let record = SessionRecord {
            format_version: r.format_version,
            snippet_id: r.snippet_id,
            participant_id: r.participant_id,
            events: r.events,
            label: r.label,
            final_buggy_line: r.final_buggy_line,
            validity: r.validity,
            submitted_at_ms: r.submitted_at_ms,
        };
        record.check()?;
        Ok(record)
    }
}

impl SessionRecord {
    pub fn new(
        snippet_id: impl Into<String>,
        participant_id: impl Into<String>,
        events: Vec<InteractionEvent>,
        label: Label,
        final_buggy_line: impl Into<String>,
        validity: Validity,
        submitted_at_ms: u64,
    ) -> Result<Self, SessionError> {
        let record = Self {
            format_version: SESSION_FORMAT_VERSION,
            snippet_id: snippet_id.into(),
            participant_id: participant_id.into(),
            events,
            label,
            final_buggy_line: final_buggy_line.into(),
            validity,
            submitted_at_ms,
        };
        record.check()?;
        Ok(record)
    }

    /// Structural checks that need no snippet.
    pub fn check(&self) -> Result<(), SessionError> {
        if self.format_version != SESSION_FORMAT_VERSION {
            return Err(SessionError::InvalidRecord(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.label == Label::FixDone && self.final_buggy_line.trim().is_empty() {
            return Err(SessionError::InvalidRecord(
                "fix_done requires a non-empty final_buggy_line".into(),
            ));
        }
        let mut last = 0;
        for (i, ev) in self.events.iter().enumerate() {
            if ev.timestamp_ms < last {
                return Err(SessionError::malformed(i, "timestamps decrease"));
            }
            last = ev.timestamp_ms;
        }
        if self.submitted_at_ms < last {
            return Err(SessionError::InvalidRecord(
                "submission precedes the last event".into(),
            ));
        }
        Ok(())
    }

    pub fn duration_ms(&self) -> u64 {
        self.submitted_at_ms
    }

    pub fn is_valid(&self) -> bool {
        self.validity == Validity::Valid
    }
}
