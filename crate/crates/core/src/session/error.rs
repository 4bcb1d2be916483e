use thiserror::Error;

use crate::code::CodeError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SessionError {
    #[error("session has no events")]
    EmptySession,
    #[error("session has zero duration")]
    ZeroDuration,
    #[error("malformed log at event {event}: {reason}")]
    MalformedLog { event: usize, reason: String },
    #[error("edit reaches outside the buggy line")]
    EditOutsideBuggyLine,
    #[error("session belongs to snippet `{session}`, not `{snippet}`")]
    SnippetMismatch { session: String, snippet: String },
    #[error("invalid session record: {0}")]
    InvalidRecord(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

impl SessionError {
    pub(crate) fn malformed(event: usize, reason: impl Into<String>) -> Self {
        SessionError::MalformedLog {
            event,
            reason: reason.into(),
        }
    }
}
