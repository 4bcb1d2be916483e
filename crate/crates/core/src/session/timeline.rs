use crate::code::Snippet;

use super::window::check_unblur_shape;
use super::{EventKind, InteractionEvent, IntervalSet, SessionError};

/// Inactivity after which everything is blurred again, whether or not the
/// client logged the blur.
pub const BLUR_TIMEOUT_MS: u64 = 3000;

/// Per original token, the merged intervals during which it was visible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityTimeline {
    pub duration_ms: u64,
    pub per_token: Vec<IntervalSet>,
}

impl VisibilityTimeline {
    pub fn visible_ms(&self, token: usize) -> u64 {
        self.per_token[token].total()
    }
}

/// Reconstructs token visibility from an event log.
///
/// A token revealed by an unblur stays visible until the next unblur, a
/// blur-everything event, [`BLUR_TIMEOUT_MS`] after the most recent event of
/// any kind, or the end of the session, whichever comes first.
pub fn build_timeline(
    snippet: &Snippet,
    events: &[InteractionEvent],
    duration_ms: u64,
) -> Result<VisibilityTimeline, SessionError> {
    let mut per_token = vec![IntervalSet::new(); snippet.token_count()];
    let mut visible: &[usize] = &[];
    let mut since = 0;
    let mut deadline = 0;
    let mut last_ts = 0;

    let mut close = |visible: &[usize], since: u64, until: u64| {
        for &tok in visible {
            per_token[tok].insert(since, until);
        }
    };

    for (i, ev) in events.iter().enumerate() {
        let t = ev.timestamp_ms;
        if t < last_ts {
            return Err(SessionError::malformed(i, "timestamps decrease"));
        }
        if t > duration_ms {
            return Err(SessionError::malformed(i, "event after session end"));
        }
        last_ts = t;
        close(visible, since, t.min(deadline).max(since));
        match &ev.kind {
            EventKind::Unblur {
                focus_token,
                visible_tokens,
                ..
            } => {
                check_unblur_shape(snippet, i, *focus_token, visible_tokens)?;
                visible = visible_tokens;
            }
            EventKind::BlurEverything => visible = &[],
            EventKind::Edit { .. } => {
                if deadline <= t {
                    visible = &[];
                }
            }
        }
        since = t;
        deadline = t + BLUR_TIMEOUT_MS;
    }
    close(visible, since, duration_ms.min(deadline).max(since));

    Ok(VisibilityTimeline {
        duration_ms,
        per_token,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::Interval;

    fn snippet() -> Snippet {
        let src = (0..30).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" ");
        Snippet::new("s", src, 1, "").unwrap()
    }

    #[test]
    fn implicit_timeout() {
        let events = [InteractionEvent::unblur(0, 3, (0..7).collect())];
        let tl = build_timeline(&snippet(), &events, 10_000).unwrap();
        for tok in 0..7 {
            assert_eq!(tl.per_token[tok].intervals(), &[Interval::new(0, 3000)]);
        }
        assert!(tl.per_token[7].is_empty());
    }

    #[test]
    fn explicit_blur() {
        let events = [
            InteractionEvent::unblur(0, 3, (0..7).collect()),
            InteractionEvent::blur_everything(1000),
        ];
        let tl = build_timeline(&snippet(), &events, 10_000).unwrap();
        assert_eq!(tl.visible_ms(0), 1000);
    }

    #[test]
    fn overlapping_windows_merge() {
        let events = [
            InteractionEvent::unblur(0, 3, (0..7).collect()),
            InteractionEvent::unblur(500, 7, (4..11).collect()),
            InteractionEvent::blur_everything(900),
        ];
        let tl = build_timeline(&snippet(), &events, 900).unwrap();
        assert_eq!(tl.per_token[5].intervals(), &[Interval::new(0, 900)]);
        assert_eq!(tl.per_token[0].intervals(), &[Interval::new(0, 500)]);
        assert_eq!(tl.per_token[10].intervals(), &[Interval::new(500, 900)]);
    }

    #[test]
    fn timeout_precedes_late_blur() {
        let events = [
            InteractionEvent::unblur(0, 0, vec![0]),
            InteractionEvent::blur_everything(5000),
        ];
        let tl = build_timeline(&snippet(), &events, 6000).unwrap();
        assert_eq!(tl.visible_ms(0), 3000);
    }

    #[test]
    fn edits_reset_the_timer_but_do_not_revive() {
        let events = [
            InteractionEvent::unblur(0, 0, vec![0]),
            InteractionEvent::edit(2000, "t0"),
            InteractionEvent::edit(8000, "t0"),
        ];
        let tl = build_timeline(&snippet(), &events, 20_000).unwrap();
        assert_eq!(tl.visible_ms(0), 5000);
    }

    #[test]
    fn clips_at_session_end() {
        let events = [InteractionEvent::unblur(100, 0, vec![0])];
        let tl = build_timeline(&snippet(), &events, 1100).unwrap();
        assert_eq!(tl.visible_ms(0), 1000);
    }

    #[test]
    fn rejects_malformed_logs() {
        let s = snippet();
        let eight = [InteractionEvent::unblur(0, 3, (0..8).collect())];
        assert!(matches!(
            build_timeline(&s, &eight, 100),
            Err(SessionError::MalformedLog { event: 0, .. })
        ));
        let backwards = [
            InteractionEvent::blur_everything(10),
            InteractionEvent::blur_everything(5),
        ];
        assert!(build_timeline(&s, &backwards, 100).is_err());
        let late = [InteractionEvent::blur_everything(500)];
        assert!(build_timeline(&s, &late, 100).is_err());
    }
}
