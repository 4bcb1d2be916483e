//! Synthetic sessions: protocol-valid random logs for fuzzing, and planted
//! participant archetypes for end-to-end checks of the analyses.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{Corpus, Snippet};
use crate::session::{compute_window, InputSource, InteractionEvent, Label, SessionRecord, Validity};

const INSERTS: &[&str] = &["+1", " ", "-", "x", "approx", "(", ")", "\"", "/*", "0", "==", ";"];

fn mutate_line(line: &str, original: &str, rng: &mut impl Rng) -> String {
    let mut chars: Vec<char> = line.chars().collect();
    match rng.random_range(0..4) {
        0 if !chars.is_empty() => {
            let at = rng.random_range(0..chars.len());
            let len = rng.random_range(1..=4).min(chars.len() - at);
            chars.drain(at..at + len);
        }
        1 | 2 => {
            let at = rng.random_range(0..=chars.len());
            let ins = INSERTS.choose(rng).expect("non-empty");
            chars.splice(at..at, ins.chars());
        }
        _ => return original.to_owned(),
    }
    chars.into_iter().collect()
}

/// A random session that passes full protocol validation: windows follow
/// the focus, timestamps never decrease, edits stay on the buggy line.
/// Gaps include zero-length steps and idle stretches beyond the blur timeout.
pub fn fuzz_session(snippet: &Snippet, participant_id: &str, max_events: usize, rng: &mut impl Rng) -> SessionRecord {
    let original = snippet.line_text(snippet.buggy_line()).expect("buggy line exists").to_owned();
    let mut line = original.clone();
    let mut edited = false;
    let n_events = rng.random_range(1..=max_events.max(1));
    let n_tokens = snippet.token_count();
    let mut t = 0u64;
    let mut events = Vec::with_capacity(n_events);
    for _ in 0..n_events {
        t += match rng.random_range(0..10) {
            0 => 0,
            1..=7 => rng.random_range(1..3000),
            _ => rng.random_range(3000..8000),
        };
        let roll: f64 = rng.random();
        if roll < 0.65 {
            let focus = rng.random_range(0..n_tokens);
            let window = compute_window(snippet, focus).expect("focus in range");
            let visible: Vec<usize> = if edited && snippet.is_on_buggy_line(focus) && rng.random_bool(0.5) {
                let lo = rng.random_range(window.start..=focus);
                let hi = rng.random_range(focus + 1..=window.end);
                (lo..hi).collect()
            } else {
                window.collect()
            };
            let mut ev = InteractionEvent::unblur(t, focus, visible);
            if let crate::session::EventKind::Unblur { input, .. } = &mut ev.kind {
                *input = [None, Some(InputSource::Mouse), Some(InputSource::Cursor)]
                    .choose(rng)
                    .copied()
                    .flatten();
            }
            events.push(ev);
        } else if roll < 0.8 {
            events.push(InteractionEvent::blur_everything(t));
        } else {
            line = mutate_line(&line, &original, rng);
            edited = true;
            events.push(InteractionEvent::edit(t, line.clone()));
        }
    }
    let end = t + rng.random_range(1..5000);
    let label = if rng.random_bool(0.5) { Label::FixDone } else { Label::CannotFix };
    let final_line = if label == Label::FixDone && line.trim().is_empty() {
        original
    } else {
        line
    };
    SessionRecord::new(snippet.id(), participant_id, events, label, final_line, Validity::Valid, end)
        .expect("generated sessions are well formed")
}

/// A participant profile: the share of attention mass it spends on the
/// buggy line.
#[derive(Debug, Clone, PartialEq)]
pub struct Archetype {
    pub name: String,
    pub buggy_line_share: f64,
}

impl Archetype {
    pub fn new(name: impl Into<String>, buggy_line_share: f64) -> Self {
        assert!((0.0..=1.0).contains(&buggy_line_share));
        Self {
            name: name.into(),
            buggy_line_share,
        }
    }
}

/// Attention mass (token-milliseconds) carried by each planted unblur.
/// Divisible by every window size 1..=7.
const UNBLUR_MASS: u64 = 2100;

/// A session whose unblurs carry roughly equal mass, a fixed fraction of
/// them focused on the buggy line. The realised buggy-line share therefore
/// sits next to the archetype's target, up to dwell jitter.
pub fn archetype_session(
    snippet: &Snippet,
    participant_id: &str,
    archetype: &Archetype,
    unblurs: usize,
    rng: &mut impl Rng,
) -> SessionRecord {
    let buggy: Vec<usize> = snippet.buggy_line_tokens().collect();
    let context: Vec<usize> = (0..snippet.token_count()).filter(|&i| !snippet.is_on_buggy_line(i)).collect();
    let n_buggy = if context.is_empty() {
        unblurs
    } else {
        (archetype.buggy_line_share * unblurs as f64).round() as usize
    };
    let mut on_buggy: Vec<bool> = (0..unblurs).map(|k| k < n_buggy).collect();
    on_buggy.shuffle(rng);

    let mut t = rng.random_range(0..1500u64);
    let mut events = Vec::with_capacity(unblurs + 4);
    for focus_buggy in on_buggy {
        let pool = if focus_buggy { &buggy } else { &context };
        let focus = *pool.choose(rng).expect("non-empty pool");
        let window = compute_window(snippet, focus).expect("focus in range");
        let dwell = UNBLUR_MASS / window.len() as u64;
        events.push(InteractionEvent::unblur(t, focus, window.collect()));
        t += (dwell as i64 + rng.random_range(-40..=40)).max(1) as u64;
        // Occasional pause with everything blurred.
        if rng.random_bool(0.05) {
            events.push(InteractionEvent::blur_everything(t));
            t += rng.random_range(200..6000);
        }
    }
    events.push(InteractionEvent::blur_everything(t));
    let fixed = snippet.line_text(snippet.buggy_line()).expect("buggy line exists").to_owned() + " ";
    events.push(InteractionEvent::edit(t + 500, fixed.clone()));
    SessionRecord::new(
        snippet.id(),
        participant_id,
        events,
        Label::FixDone,
        fixed,
        Validity::Valid,
        t + 1000,
    )
    .expect("generated sessions are well formed")
}

/// One session per (participant, snippet) for `per_archetype` participants
/// of each archetype, named `<archetype>-<k>`.
pub fn synthetic_cohort(
    corpus: &Corpus,
    archetypes: &[Archetype],
    per_archetype: usize,
    unblurs: usize,
    seed: u64,
) -> Vec<SessionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for a in archetypes {
        for k in 0..per_archetype {
            let participant = format!("{}-{k:02}", a.name);
            for s in corpus.snippets() {
                out.push(archetype_session(s, &participant, a, unblurs, &mut rng));
            }
        }
    }
    out
}
