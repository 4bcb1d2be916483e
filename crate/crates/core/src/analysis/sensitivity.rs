use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::Snippet;
use crate::session::{derive_attention, EventKind, InteractionEvent, SessionRecord, MAX_WINDOW};
use crate::{AttentionVector, Scalar};

use super::AnalysisError;

/// Shrinks every unblur set to a random contiguous run of `window` tokens
/// (or the whole set if it is smaller), drawn uniformly among the runs.
///
/// The focus token moves to the run element closest to the original focus.
pub fn perturb_events(
    events: &[InteractionEvent],
    window: usize,
    rng: &mut impl Rng,
) -> Result<Vec<InteractionEvent>, AnalysisError> {
    if !(1..=MAX_WINDOW).contains(&window) {
        return Err(AnalysisError::InvalidWindow(window));
    }
    let perturbed = events
        .iter()
        .map(|ev| match &ev.kind {
            EventKind::Unblur {
                focus_token,
                visible_tokens,
                input,
            } => {
                let mut sorted = visible_tokens.clone();
                sorted.sort_unstable();
                let k = window.min(sorted.len());
                let offset = rng.random_range(0..=sorted.len() - k);
                let run = sorted[offset..offset + k].to_vec();
                let focus = *run
                    .iter()
                    .min_by_key(|&&t| (t.abs_diff(*focus_token), t))
                    .expect("runs are non-empty");
                InteractionEvent {
                    timestamp_ms: ev.timestamp_ms,
                    kind: EventKind::Unblur {
                        focus_token: focus,
                        visible_tokens: run,
                        input: *input,
                    },
                }
            }
            _ => ev.clone(),
        })
        .collect();
    Ok(perturbed)
}

/// Developer attention re-derived with simulated windows of size `window`.
///
/// Seeded and reproducible; with `window == 7` the result is the baseline
/// attention vector.
pub fn window_sensitivity<F: Scalar>(
    snippet: &Snippet,
    session: &SessionRecord,
    window: usize,
    seed: u64,
) -> Result<AttentionVector<F>, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = perturb_events(&session.events, window, &mut rng)?;
    let simulated = SessionRecord {
        events,
        ..session.clone()
    };
    Ok(derive_attention(snippet, &simulated)?)
}
