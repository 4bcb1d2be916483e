use crate::code::{tokenize_lenient, Snippet};

use super::{EventKind, InteractionEvent, SessionError};

/// A token currently on the (possibly edited) buggy line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineToken {
    pub text: String,
    /// Index of the original token this one still is, `None` if inserted.
    pub origin: Option<usize>,
    pub col_start: usize,
    pub col_end: usize,
}

/// Which original buggy-line tokens still carry attention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackingState {
    line: Vec<LineToken>,
    /// Per original token: the edit timestamp from which it stopped being tracked.
    untracked_at: Vec<Option<u64>>,
}

impl TrackingState {
    pub fn initial(snippet: &Snippet) -> Self {
        let line = snippet.tokens()[snippet.buggy_line_tokens()]
            .iter()
            .map(|t| LineToken {
                text: t.text.clone(),
                origin: Some(t.index),
                col_start: t.col_start,
                col_end: t.col_end,
            })
            .collect();
        Self {
            line,
            untracked_at: vec![None; snippet.token_count()],
        }
    }

    pub fn line(&self) -> &[LineToken] {
        &self.line
    }

    pub fn is_tracked(&self, token: usize) -> bool {
        self.untracked_at[token].is_none()
    }

    pub fn untracked_at(&self, token: usize) -> Option<u64> {
        self.untracked_at[token]
    }

    pub fn untracked(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.untracked_at
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
    }
}

/// Indices `(i, j)` of a longest common subsequence of `a` and `b`,
/// preferring the earliest match in `b` for each element of `a`.
fn lcs_pairs(a: &[&str], b: &[&str]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    // suffix[i][j] = LCS length of a[i..] and b[j..]
    let mut suffix = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            suffix[i][j] = if a[i] == b[j] {
                suffix[i + 1][j + 1] + 1
            } else {
                suffix[i + 1][j].max(suffix[i][j + 1])
            };
        }
    }
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::new();
    while i < n && j < m {
        if a[i] == b[j] && suffix[i][j] == suffix[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if suffix[i][j + 1] >= suffix[i + 1][j] {
            j += 1;
        } else {
            i += 1;
        }
    }
    pairs
}

/// Applies an edit of the buggy line made at `timestamp_ms`.
///
/// Tokens of the previous line that survive, in order and with identical
/// text, as a longest common subsequence of the new line keep their identity
/// (with updated columns). Original tokens that do not survive are untracked
/// from `timestamp_ms` on, permanently; inserted tokens are never tracked.
pub fn apply_edit(
    snippet: &Snippet,
    state: &TrackingState,
    edit_payload: &str,
    timestamp_ms: u64,
) -> Result<TrackingState, SessionError> {
    debug_assert_eq!(state.untracked_at.len(), snippet.token_count());
    if edit_payload.contains(['\n', '\r']) {
        return Err(SessionError::EditOutsideBuggyLine);
    }
    let new_tokens = tokenize_lenient(edit_payload);
    let old: Vec<&str> = state.line.iter().map(|t| t.text.as_str()).collect();
    let new: Vec<&str> = new_tokens.iter().map(|t| t.text.as_str()).collect();
    let pairs = lcs_pairs(&old, &new);

    let mut line: Vec<LineToken> = new_tokens
        .iter()
        .map(|t| LineToken {
            text: t.text.clone(),
            origin: None,
            col_start: t.col_start,
            col_end: t.col_end,
        })
        .collect();
    let mut survived = vec![false; old.len()];
    for &(i, j) in &pairs {
        line[j].origin = state.line[i].origin;
        survived[i] = true;
    }

    let mut untracked_at = state.untracked_at.clone();
    for (i, tok) in state.line.iter().enumerate() {
        if let (false, Some(orig)) = (survived[i], tok.origin) {
            untracked_at[orig].get_or_insert(timestamp_ms);
        }
    }
    Ok(TrackingState { line, untracked_at })
}

/// Folds every edit event of a log into a tracking state.
pub fn track_edits(
    snippet: &Snippet,
    events: &[InteractionEvent],
) -> Result<TrackingState, SessionError> {
    let mut state = TrackingState::initial(snippet);
    for ev in events {
        if let EventKind::Edit { edit_payload } = &ev.kind {
            state = apply_edit(snippet, &state, edit_payload, ev.timestamp_ms)?;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_snippet() -> Snippet {
        let src = "double approx = x / 2d;\nwhile (Math.abs(x-approx) > epsilon) {\n    approx = 0.5d * (approx + x / approx);\n}";
        Snippet::new("sqrt", src, 2, "").unwrap()
    }

    fn tracked_texts(s: &Snippet, st: &TrackingState) -> Vec<String> {
        s.buggy_line_tokens()
            .filter(|&i| st.is_tracked(i))
            .map(|i| s.tokens()[i].text.clone())
            .collect()
    }

    #[test]
    fn identity_edit_keeps_everything() {
        let s = sqrt_snippet();
        let st = TrackingState::initial(&s);
        let line = s.line_text(2).unwrap();
        let next = apply_edit(&s, &st, line, 10).unwrap();
        assert_eq!(next.untracked().count(), 0);
        assert!(next.line().iter().all(|t| t.origin.is_some()));
    }

    #[test]
    fn deletion_untracks_one_token() {
        let s = sqrt_snippet();
        let st = TrackingState::initial(&s);
        let next = apply_edit(&s, &st, "while (Math.abs(x approx) > epsilon) {", 10).unwrap();
        let minus = s.buggy_line_tokens().find(|&i| s.tokens()[i].text == "-").unwrap();
        assert_eq!(next.untracked().collect::<Vec<_>>(), vec![(minus, 10)]);
    }

    #[test]
    fn lcs_keeps_first_occurrence() {
        let s = sqrt_snippet();
        let st = TrackingState::initial(&s);
        let next = apply_edit(
            &s,
            &st,
            "while (Math.abs(x-approx*approx) > epsilon) {",
            42,
        )
        .unwrap();
        assert_eq!(next.untracked().count(), 0);
        let texts: Vec<(&str, bool)> = next
            .line()
            .iter()
            .map(|t| (t.text.as_str(), t.origin.is_some()))
            .collect();
        let pos = texts.iter().position(|t| t.0 == "*").unwrap();
        assert_eq!(texts[pos - 1], ("approx", true));
        assert_eq!(texts[pos], ("*", false));
        assert_eq!(texts[pos + 1], ("approx", false));
        // Columns follow the new text.
        assert_eq!(next.line()[pos].col_start, 24);
    }

    #[test]
    fn untracking_is_permanent() {
        let s = sqrt_snippet();
        let mut st = TrackingState::initial(&s);
        st = apply_edit(&s, &st, "while (Math.abs(x) > epsilon) {", 5).unwrap();
        // Retyping the same text creates a new, untracked token.
        st = apply_edit(&s, &st, "while (Math.abs(x-approx) > epsilon) {", 9).unwrap();
        let approx_idx = s
            .buggy_line_tokens()
            .find(|&i| s.tokens()[i].text == "approx")
            .unwrap();
        assert_eq!(st.untracked_at(approx_idx), Some(5));
        assert!(!tracked_texts(&s, &st).contains(&"approx".to_string()));
    }

    #[test]
    fn multi_line_edit_is_rejected() {
        let s = sqrt_snippet();
        let st = TrackingState::initial(&s);
        assert_eq!(
            apply_edit(&s, &st, "a;\nb;", 1).unwrap_err(),
            SessionError::EditOutsideBuggyLine
        );
    }

    #[test]
    fn half_typed_code_is_tolerated() {
        let s = sqrt_snippet();
        let st = TrackingState::initial(&s);
        let next = apply_edit(&s, &st, "while (Math.abs(x-\"approx) > epsilon) {", 3).unwrap();
        assert!(next.untracked().count() > 0);
    }

    #[test]
    fn lcs_oracle_agrees_with_brute_force() {
        // Brute force: longest subsequence of `a` that is a subsequence of `b`.
        fn is_subseq(x: &[&str], b: &[&str]) -> bool {
            let mut it = b.iter();
            x.iter().all(|t| it.any(|u| u == t))
        }
        let a = ["x", "-", "approx", ")", "x"];
        let b = ["x", "-", "approx", "*", "approx", ")", "y", "x"];
        let mut best = 0;
        for mask in 0u32..(1 << a.len()) {
            let sub: Vec<&str> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
            if is_subseq(&sub, &b) {
                best = best.max(sub.len());
            }
        }
        assert_eq!(lcs_pairs(&a, &b).len(), best);
        assert_eq!(lcs_pairs(&a, &b), vec![(0, 0), (1, 1), (2, 2), (3, 5), (4, 7)]);
    }
}
