use std::ops::Range;

use crate::code::{CodeError, Snippet};

use super::SessionError;

/// Tokens revealed on each side of the focus token.
pub const WINDOW_RADIUS: usize = 3;
/// Largest possible visible set.
pub const MAX_WINDOW: usize = 2 * WINDOW_RADIUS + 1;

/// The tokens revealed when the focus is on `cursor`: up to three on each
/// side, clipped to the focus token's line.
pub fn compute_window(snippet: &Snippet, cursor: usize) -> Result<Range<usize>, CodeError> {
    let line = snippet.token(cursor)?.line;
    let on_line = snippet.line_tokens(line)?;
    let lo = cursor.saturating_sub(WINDOW_RADIUS).max(on_line.start);
    let hi = (cursor + WINDOW_RADIUS + 1).min(on_line.end);
    Ok(lo..hi)
}

/// Checks the structural rule of an unblur event: a non-empty set of at
/// most seven distinct tokens, all on one line, containing the focus.
pub fn check_unblur_shape(
    snippet: &Snippet,
    event: usize,
    focus: usize,
    visible: &[usize],
) -> Result<(), SessionError> {
    let n = snippet.token_count();
    if visible.is_empty() {
        return Err(SessionError::malformed(event, "empty visible set"));
    }
    if visible.len() > MAX_WINDOW {
        return Err(SessionError::malformed(
            event,
            format!("{} visible tokens exceed {MAX_WINDOW}", visible.len()),
        ));
    }
    if let Some(&bad) = visible.iter().chain([&focus]).find(|&&i| i >= n) {
        return Err(SessionError::malformed(
            event,
            format!("token {bad} out of range ({n} tokens)"),
        ));
    }
    let line = snippet.tokens()[focus].line;
    if visible.iter().any(|&i| snippet.tokens()[i].line != line) {
        return Err(SessionError::malformed(event, "visible tokens span several lines"));
    }
    let mut sorted = visible.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(SessionError::malformed(event, "duplicate visible token"));
    }
    if !visible.contains(&focus) {
        return Err(SessionError::malformed(event, "focus token not visible"));
    }
    Ok(())
}
