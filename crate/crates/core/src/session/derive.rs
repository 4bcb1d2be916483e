use crate::code::Snippet;
use crate::{AttentionVector, Scalar};

use super::tracking::{apply_edit, track_edits, TrackingState};
use super::window::check_unblur_shape;
use super::{build_timeline, EventKind, InteractionEvent, SessionError, SessionRecord, BLUR_TIMEOUT_MS};

fn check_session(snippet: &Snippet, session: &SessionRecord) -> Result<(), SessionError> {
    if session.snippet_id != snippet.id() {
        return Err(SessionError::SnippetMismatch {
            session: session.snippet_id.clone(),
            snippet: snippet.id().to_owned(),
        });
    }
    if session.events.is_empty() {
        return Err(SessionError::EmptySession);
    }
    if session.duration_ms() == 0 {
        return Err(SessionError::ZeroDuration);
    }
    Ok(())
}

fn normalise<F: Scalar>(
    snippet: &Snippet,
    visible_ms: &[u64],
    duration_ms: u64,
) -> AttentionVector<F> {
    let total = F::from_count(duration_ms);
    let weights = visible_ms
        .iter()
        .map(|&ms| F::from_count(ms) / total)
        .collect();
    AttentionVector::new(snippet.id(), weights).expect("ratios of counts are finite and >= 0")
}

/// Tracked visible milliseconds per original token, via the merged
/// visibility timeline.
pub fn visible_time_ms(
    snippet: &Snippet,
    events: &[InteractionEvent],
    duration_ms: u64,
) -> Result<Vec<u64>, SessionError> {
    let timeline = build_timeline(snippet, events, duration_ms)?;
    let tracking = track_edits(snippet, events)?;
    Ok(timeline
        .per_token
        .iter()
        .enumerate()
        .map(|(i, set)| match tracking.untracked_at(i) {
            Some(t) => set.total_before(t),
            None => set.total(),
        })
        .collect())
}

/// Developer attention: for every token, the time it was visible divided by
/// the session duration.
pub fn derive_attention<F: Scalar>(
    snippet: &Snippet,
    session: &SessionRecord,
) -> Result<AttentionVector<F>, SessionError> {
    check_session(snippet, session)?;
    let ms = visible_time_ms(snippet, &session.events, session.duration_ms())?;
    Ok(normalise(snippet, &ms, session.duration_ms()))
}

/// Incremental event-by-event fold of a session log.
///
/// Accrues visible time per token as events arrive instead of building
/// interval sets, so it can follow a live log. [`replay`] drives it over a
/// whole record; its output equals [`derive_attention`] bit for bit.
#[derive(Debug, Clone)]
pub struct SessionReplayer<'a> {
    snippet: &'a Snippet,
    tracking: TrackingState,
    accrued: Vec<u64>,
    visible: Vec<usize>,
    since: u64,
    deadline: u64,
    last_ts: u64,
    applied: usize,
}

impl<'a> SessionReplayer<'a> {
    pub fn new(snippet: &'a Snippet) -> Self {
        Self {
            snippet,
            tracking: TrackingState::initial(snippet),
            accrued: vec![0; snippet.token_count()],
            visible: Vec::new(),
            since: 0,
            deadline: 0,
            last_ts: 0,
            applied: 0,
        }
    }

    fn accrue_until(&mut self, t: u64) {
        let until = t.min(self.deadline).max(self.since);
        for &tok in &self.visible {
            self.accrued[tok] += until - self.since;
        }
        self.since = until;
    }

    pub fn apply(&mut self, ev: &InteractionEvent) -> Result<(), SessionError> {
        let i = self.applied;
        let t = ev.timestamp_ms;
        if t < self.last_ts {
            return Err(SessionError::malformed(i, "timestamps decrease"));
        }
        self.accrue_until(t);
        match &ev.kind {
            EventKind::Unblur {
                focus_token,
                visible_tokens,
                ..
            } => {
                check_unblur_shape(self.snippet, i, *focus_token, visible_tokens)?;
                self.visible.clone_from(visible_tokens);
            }
            EventKind::BlurEverything => self.visible.clear(),
            EventKind::Edit { edit_payload } => {
                if self.deadline <= t {
                    self.visible.clear();
                }
                self.tracking = apply_edit(self.snippet, &self.tracking, edit_payload, t)?;
            }
        }
        let tracking = &self.tracking;
        self.visible.retain(|&tok| tracking.is_tracked(tok));
        self.since = t;
        self.deadline = t + BLUR_TIMEOUT_MS;
        self.last_ts = t;
        self.applied += 1;
        Ok(())
    }

    /// Tracked visible milliseconds per token, with the session ending at
    /// `duration_ms`.
    pub fn finish_ms(mut self, duration_ms: u64) -> Result<Vec<u64>, SessionError> {
        if duration_ms < self.last_ts {
            return Err(SessionError::malformed(self.applied, "event after session end"));
        }
        self.accrue_until(duration_ms);
        Ok(self.accrued)
    }

    pub fn finish<F: Scalar>(self, duration_ms: u64) -> Result<AttentionVector<F>, SessionError> {
        if duration_ms == 0 {
            return Err(SessionError::ZeroDuration);
        }
        let snippet = self.snippet;
        let ms = self.finish_ms(duration_ms)?;
        Ok(normalise(snippet, &ms, duration_ms))
    }
}

/// Re-derives developer attention by folding the log event by event.
pub fn replay<F: Scalar>(
    snippet: &Snippet,
    session: &SessionRecord,
) -> Result<AttentionVector<F>, SessionError> {
    check_session(snippet, session)?;
    let mut replayer = SessionReplayer::new(snippet);
    for ev in &session.events {
        if ev.timestamp_ms > session.duration_ms() {
            return Err(SessionError::malformed(replayer.applied, "event after session end"));
        }
        replayer.apply(ev)?;
    }
    replayer.finish(session.duration_ms())
}
