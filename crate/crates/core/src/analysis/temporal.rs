use crate::code::Snippet;
use crate::session::{build_timeline, track_edits, EventKind, SessionError, SessionRecord};
use crate::Scalar;

use super::AnalysisError;

pub const DEFAULT_BINS: usize = 20;

/// Behaviour during one equal-length slice of a session.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalBin<F> {
    pub start_ms: F,
    pub end_ms: F,
    /// Attention mass (visible time over session duration) on the buggy line.
    pub buggy_mass: F,
    pub context_mass: F,
    /// `None` when the bin carries no attention.
    pub buggy_fraction: Option<F>,
    pub context_fraction: Option<F>,
    pub switch_count: usize,
    pub edit_count: usize,
    pub unblur_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalProfile<F> {
    pub bins: Vec<TemporalBin<F>>,
}

impl<F: Scalar> TemporalProfile<F> {
    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn total_switches(&self) -> usize {
        self.bins.iter().map(|b| b.switch_count).sum()
    }

    pub fn total_mass(&self) -> F {
        self.bins
            .iter()
            .map(|b| b.buggy_mass + b.context_mass)
            .sum()
    }
}

/// Splits a session into `n_bins` equal time slices.
///
/// Visibility intervals are cut at bin boundaries and each piece credited to
/// its bin. Edit and unblur events are counted in the bin of their
/// timestamp; a switch is an unblur whose focus token lies on the other side
/// of the buggy-line boundary than the previous unblur's focus, and is
/// counted in the bin of the later event.
pub fn temporal_profile<F: Scalar>(
    snippet: &Snippet,
    session: &SessionRecord,
    n_bins: usize,
) -> Result<TemporalProfile<F>, AnalysisError> {
    if n_bins == 0 {
        return Err(AnalysisError::InvalidBins);
    }
    if session.events.is_empty() {
        return Err(SessionError::EmptySession.into());
    }
    let duration = session.duration_ms();
    if duration == 0 {
        return Err(SessionError::ZeroDuration.into());
    }
    let timeline = build_timeline(snippet, &session.events, duration)?;
    let tracking = track_edits(snippet, &session.events)?;

    // Work in units of 1/n_bins ms so that every bin boundary is an integer.
    let nb = n_bins as u128;
    let d = duration as u128;
    let mut buggy = vec![0u128; n_bins];
    let mut context = vec![0u128; n_bins];
    for (tok, set) in timeline.per_token.iter().enumerate() {
        let cut = tracking.untracked_at(tok).unwrap_or(u64::MAX);
        let acc = if snippet.is_on_buggy_line(tok) {
            &mut buggy
        } else {
            &mut context
        };
        for iv in set.intervals() {
            let (s, e) = (iv.start as u128 * nb, iv.end.min(cut) as u128 * nb);
            if s >= e {
                continue;
            }
            let first = (s / d) as usize;
            for (b, slot) in acc.iter_mut().enumerate().skip(first) {
                let (lo, hi) = (b as u128 * d, (b as u128 + 1) * d);
                if lo >= e {
                    break;
                }
                *slot += e.min(hi) - s.max(lo);
            }
        }
    }

    let bin_of = |t: u64| ((t as u128 * nb / d) as usize).min(n_bins - 1);
    let mut switches = vec![0; n_bins];
    let mut edits = vec![0; n_bins];
    let mut unblurs = vec![0; n_bins];
    let mut prev_on_buggy: Option<bool> = None;
    for ev in &session.events {
        let b = bin_of(ev.timestamp_ms);
        match &ev.kind {
            EventKind::Unblur { focus_token, .. } => {
                unblurs[b] += 1;
                let on_buggy = snippet.is_on_buggy_line(*focus_token);
                if prev_on_buggy.is_some_and(|p| p != on_buggy) {
                    switches[b] += 1;
                }
                prev_on_buggy = Some(on_buggy);
            }
            EventKind::Edit { .. } => edits[b] += 1,
            EventKind::BlurEverything => {}
        }
    }

    let scale = F::from_count(duration) * F::from_count(n_bins as u64);
    let to_mass = |units: u128| F::from_f64_lossy(units as f64) / scale;
    let bin_len = F::from_count(duration) / F::from_count(n_bins as u64);
    let bins = (0..n_bins)
        .map(|b| {
            let (bm, cm) = (to_mass(buggy[b]), to_mass(context[b]));
            let sum_units = buggy[b] + context[b];
            let buggy_fraction = (sum_units > 0)
                .then(|| F::from_f64_lossy(buggy[b] as f64) / F::from_f64_lossy(sum_units as f64));
            TemporalBin {
                start_ms: bin_len * F::from_count(b as u64),
                end_ms: bin_len * F::from_count(b as u64 + 1),
                buggy_mass: bm,
                context_mass: cm,
                buggy_fraction,
                context_fraction: buggy_fraction.map(|f| F::one() - f),
                switch_count: switches[b],
                edit_count: edits[b],
                unblur_count: unblurs[b],
            }
        })
        .collect();
    Ok(TemporalProfile { bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{derive_attention, InteractionEvent, Label, Validity};
    use crate::AttentionVector;

    fn snippet() -> Snippet {
        Snippet::new("t", "a b c d\ne f g h", 2, "").unwrap()
    }

    fn record(events: Vec<InteractionEvent>, end: u64) -> SessionRecord {
        SessionRecord::new("t", "p", events, Label::CannotFix, "", Validity::Valid, end).unwrap()
    }

    #[test]
    fn buggy_only_session() {
        let events = (0..10)
            .map(|k| InteractionEvent::unblur(k * 1000, 5, vec![4, 5, 6, 7]))
            .collect();
        let p: TemporalProfile<f64> = temporal_profile(&snippet(), &record(events, 10_000), 20).unwrap();
        assert_eq!(p.n_bins(), 20);
        assert_eq!(p.total_switches(), 0);
        for b in &p.bins {
            if let Some(f) = b.buggy_fraction {
                assert_eq!(f, 1.0);
                assert_eq!(b.context_fraction, Some(0.0));
            }
        }
        assert_eq!(p.bins.iter().map(|b| b.unblur_count).sum::<usize>(), 10);
    }

    #[test]
    fn alternating_focus_switches_every_time() {
        let events = (0..10)
            .map(|k| {
                if k % 2 == 0 {
                    InteractionEvent::unblur(k * 100, 1, vec![0, 1, 2, 3])
                } else {
                    InteractionEvent::unblur(k * 100, 6, vec![4, 5, 6, 7])
                }
            })
            .collect();
        let p: TemporalProfile<f64> = temporal_profile(&snippet(), &record(events, 2000), 20).unwrap();
        assert_eq!(p.total_switches(), 9);
    }

    #[test]
    fn straddling_interval_is_split() {
        // Bins of 100 ms; token 0 visible [150, 330).
        let events = vec![
            InteractionEvent::unblur(150, 0, vec![0, 1, 2, 3]),
            InteractionEvent::blur_everything(330),
            InteractionEvent::edit(420, "e f g h"),
        ];
        let p: TemporalProfile<f64> = temporal_profile(&snippet(), &record(events, 1000), 10).unwrap();
        let per_bin: Vec<f64> = p.bins.iter().map(|b| b.context_mass).collect();
        // 4 tokens × {50, 100, 30} ms over 1000 ms.
        assert!((per_bin[1] - 0.2).abs() < 1e-12);
        assert!((per_bin[2] - 0.4).abs() < 1e-12);
        assert!((per_bin[3] - 0.12).abs() < 1e-12);
        assert_eq!(per_bin[0], 0.0);
        assert_eq!(p.bins[4].edit_count, 1);
        assert_eq!(p.bins[3].buggy_fraction, Some(0.0));
        assert_eq!(p.bins[5].buggy_fraction, None);
    }

    #[test]
    fn bins_conserve_mass() {
        let events = vec![
            InteractionEvent::unblur(7, 0, vec![0, 1, 2, 3]),
            InteractionEvent::unblur(1333, 6, vec![4, 5, 6, 7]),
            InteractionEvent::edit(2100, "e f x h"),
            InteractionEvent::unblur(2999, 1, vec![0, 1, 2, 3]),
        ];
        let rec = record(events, 7919);
        let p: TemporalProfile<f64> = temporal_profile(&snippet(), &rec, 20).unwrap();
        let v: AttentionVector<f64> = derive_attention(&snippet(), &rec).unwrap();
        assert!((p.total_mass() - v.total()).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            temporal_profile::<f64>(&snippet(), &record(vec![], 10), 20),
            Err(AnalysisError::Session(SessionError::EmptySession))
        ));
        let rec = record(vec![InteractionEvent::blur_everything(1)], 10);
        assert_eq!(
            temporal_profile::<f64>(&snippet(), &rec, 0).unwrap_err(),
            AnalysisError::InvalidBins
        );
    }
}
