use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown participant `{0}`")]
    UnknownParticipant(String),
    #[error("participant `{0}` is already registered")]
    DuplicateParticipant(String),
    #[error("unknown snippet `{0}`")]
    UnknownSnippet(String),
    #[error("snippet `{snippet}` is not assigned to participant `{participant}`")]
    NotAssigned { participant: String, snippet: String },
    #[error("cannot assign {needed} distinct tasks from {available} snippets")]
    CorpusExhausted { needed: usize, available: usize },
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` is closed")]
    StaleSession(String),
    #[error("session `{0}` was already submitted")]
    AlreadyClosed(String),
    #[error("batch starts at {got_ms} ms, before last persisted event at {last_ms} ms")]
    OutOfOrderBatch { last_ms: u64, got_ms: u64 },
    #[error("event {index} of batch: {reason}")]
    MalformedEvent { index: usize, reason: String },
    #[error("session has no events")]
    EmptySession,
    #[error("invalid submission: {0}")]
    InvalidSubmission(String),
    #[error("unsupported format_version {0}")]
    UnsupportedVersion(u32),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("corpus: {0}")]
    Corpus(#[from] codeattn_core::code::CorpusError),
    #[error("storage: {0}")]
    Storage(#[from] std::io::Error),
    #[error("stored data at {path}: {reason}")]
    Corrupt { path: String, reason: String },
}

impl ServiceError {
    /// Stable machine-readable code, part of the HTTP contract.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownParticipant(_) => "unknown_participant",
            ServiceError::DuplicateParticipant(_) => "duplicate_participant",
            ServiceError::UnknownSnippet(_) => "unknown_snippet",
            ServiceError::NotAssigned { .. } => "not_assigned",
            ServiceError::CorpusExhausted { .. } => "corpus_exhausted",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::StaleSession(_) => "stale_session",
            ServiceError::AlreadyClosed(_) => "already_closed",
            ServiceError::OutOfOrderBatch { .. } => "out_of_order_batch",
            ServiceError::MalformedEvent { .. } => "malformed_event",
            ServiceError::EmptySession => "empty_session",
            ServiceError::InvalidSubmission(_) => "invalid_submission",
            ServiceError::UnsupportedVersion(_) => "unsupported_version",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Config(_) => "config",
            ServiceError::Corpus(_) => "corpus",
            ServiceError::Storage(_) => "storage",
            ServiceError::Corrupt { .. } => "corrupt_storage",
        }
    }
}
