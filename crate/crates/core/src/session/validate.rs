use crate::code::Snippet;

use super::window::{check_unblur_shape, compute_window};
use super::{EventKind, InteractionEvent, SessionError};

/// Incremental validator enforcing the full protocol on an event stream.
///
/// Beyond the structural rule checked during timeline construction, every
/// unblur set must equal the window around its focus token. Once the buggy
/// line has been edited, sets focused on that line only need to be a subset
/// of its original tokens, since the client's window then spans edited text.
#[derive(Debug, Clone)]
pub struct EventValidator<'a> {
    snippet: &'a Snippet,
    last_ts: u64,
    edited: bool,
    seen: usize,
}

impl<'a> EventValidator<'a> {
    pub fn new(snippet: &'a Snippet) -> Self {
        Self {
            snippet,
            last_ts: 0,
            edited: false,
            seen: 0,
        }
    }

    /// Resumes validation after `events` were already accepted.
    pub fn resume(snippet: &'a Snippet, events: &[InteractionEvent]) -> Self {
        Self {
            snippet,
            last_ts: events.last().map_or(0, |e| e.timestamp_ms),
            edited: events.iter().any(InteractionEvent::is_edit),
            seen: events.len(),
        }
    }

    pub fn last_timestamp(&self) -> u64 {
        self.last_ts
    }

    pub fn check(&mut self, ev: &InteractionEvent) -> Result<(), SessionError> {
        let i = self.seen;
        if ev.timestamp_ms < self.last_ts {
            return Err(SessionError::malformed(i, "timestamps decrease"));
        }
        match &ev.kind {
            EventKind::Unblur {
                focus_token,
                visible_tokens,
                ..
            } => {
                check_unblur_shape(self.snippet, i, *focus_token, visible_tokens)?;
                let window = compute_window(self.snippet, *focus_token)?;
                let relaxed = self.edited && self.snippet.is_on_buggy_line(*focus_token);
                let ok = if relaxed {
                    true
                } else {
                    let mut sorted = visible_tokens.clone();
                    sorted.sort_unstable();
                    sorted.iter().copied().eq(window.clone())
                };
                if !ok {
                    return Err(SessionError::malformed(
                        i,
                        format!("visible set differs from window {window:?} around focus"),
                    ));
                }
            }
            EventKind::BlurEverything => {}
            EventKind::Edit { edit_payload } => {
                if edit_payload.contains(['\n', '\r']) {
                    return Err(SessionError::EditOutsideBuggyLine);
                }
                self.edited = true;
            }
        }
        self.last_ts = ev.timestamp_ms;
        self.seen += 1;
        Ok(())
    }

    pub fn check_all(&mut self, events: &[InteractionEvent]) -> Result<(), SessionError> {
        events.iter().try_for_each(|e| self.check(e))
    }
}
