use std::fmt::Write as _;

use codeattn_core::{AttentionVector, Snippet};

const GLYPHS: &[char] = &[' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];

fn glyph(w: f64, max: f64) -> char {
    if w <= 0.0 || max <= 0.0 {
        return GLYPHS[0];
    }
    let level = ((w / max) * (GLYPHS.len() - 1) as f64).ceil() as usize;
    GLYPHS[level.clamp(1, GLYPHS.len() - 1)]
}

/// `index text:weight`, one token per line, weights to three decimals.
pub fn token_weights(snippet: &Snippet, v: &AttentionVector<f64>) -> String {
    let mut out = String::new();
    for (t, w) in snippet.tokens().iter().zip(v.weights()) {
        let _ = writeln!(out, "{:>4} {}:{w:.3}", t.index, t.text);
    }
    out
}

/// Each source line followed by a row of glyphs under its tokens, the
/// glyph darkening with the token's weight relative to the largest.
pub fn heat_rendering(snippet: &Snippet, v: &AttentionVector<f64>) -> String {
    let max = v.weights().iter().copied().fold(0.0, f64::max);
    let mut out = String::new();
    for line in 1..=snippet.line_count() {
        let text = snippet.line_text(line).expect("line in range");
        let width = text.chars().count();
        let mut heat = vec![' '; width];
        for i in snippet.line_tokens(line).expect("line in range") {
            let t = &snippet.tokens()[i];
            let g = glyph(v.weights()[i], max);
            for c in heat.iter_mut().take(t.col_end.min(width)).skip(t.col_start) {
                *c = g;
            }
        }
        let marker = if line == snippet.buggy_line() { '>' } else { ' ' };
        let _ = writeln!(out, "{marker}{line:>3} | {text}");
        let heat: String = heat.into_iter().collect();
        let _ = writeln!(out, "     | {}", heat.trim_end());
    }
    out
}
