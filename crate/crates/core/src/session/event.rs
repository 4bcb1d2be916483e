use serde::{Deserialize, Serialize};

/// Which input device moved the focus. Recorded for audit; analysis treats
/// both the same.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Mouse,
    Cursor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// The focus moved onto `focus_token`, revealing `visible_tokens`.
    Unblur {
        focus_token: usize,
        visible_tokens: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input: Option<InputSource>,
    },
    BlurEverything,
    /// The buggy line was edited; `edit_payload` is its full new text.
    Edit { edit_payload: String },
}

/// One timestamped editor event. Timestamps are milliseconds since session
/// start on the client clock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub timestamp_ms: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl InteractionEvent {
    pub fn unblur(timestamp_ms: u64, focus_token: usize, visible_tokens: Vec<usize>) -> Self {
        Self {
            timestamp_ms,
            kind: EventKind::Unblur {
                focus_token,
                visible_tokens,
                input: None,
            },
        }
    }

    pub fn blur_everything(timestamp_ms: u64) -> Self {
        Self {
            timestamp_ms,
            kind: EventKind::BlurEverything,
        }
    }

    pub fn edit(timestamp_ms: u64, edit_payload: impl Into<String>) -> Self {
        Self {
            timestamp_ms,
            kind: EventKind::Edit {
                edit_payload: edit_payload.into(),
            },
        }
    }

    pub fn is_unblur(&self) -> bool {
        matches!(self.kind, EventKind::Unblur { .. })
    }

    pub fn is_edit(&self) -> bool {
        matches!(self.kind, EventKind::Edit { .. })
    }

    pub fn focus_token(&self) -> Option<usize> {
        match self.kind {
            EventKind::Unblur { focus_token, .. } => Some(focus_token),
            _ => None,
        }
    }
}
