use std::collections::BTreeSet;

use crate::code::Snippet;
use crate::{AttentionVector, Scalar};

use super::{spearman_slices, AnalysisError, Correlation};

fn mass_share<F: Scalar>(
    v: &AttentionVector<F>,
    mut include: impl FnMut(usize) -> bool,
) -> Result<F, AnalysisError> {
    let total = v.total();
    if !(total > F::zero()) {
        return Err(AnalysisError::ZeroMass);
    }
    let part: F = v
        .weights()
        .iter()
        .enumerate()
        .filter(|(i, _)| include(*i))
        .map(|(_, &w)| w)
        .sum();
    Ok(part / total)
}

/// Fraction of the attention mass on the buggy line. The context share is
/// one minus this.
pub fn buggy_line_share<F: Scalar>(snippet: &Snippet, v: &AttentionVector<F>) -> Result<F, AnalysisError> {
    let line = snippet.buggy_line_tokens();
    mass_share(v, |i| line.contains(&i))
}

/// Fraction of the attention mass on the tokens of the given lines.
pub fn aoi_share<F: Scalar>(
    snippet: &Snippet,
    v: &AttentionVector<F>,
    aoi_lines: &[usize],
) -> Result<F, AnalysisError> {
    if aoi_lines.is_empty() {
        return Err(AnalysisError::InvalidAoi("no lines given".into()));
    }
    let lines: BTreeSet<usize> = aoi_lines.iter().copied().collect();
    if let Some(&bad) = lines.iter().find(|&&l| l == 0 || l > snippet.line_count()) {
        return Err(AnalysisError::InvalidAoi(format!(
            "line {bad} outside 1..={}",
            snippet.line_count()
        )));
    }
    let tokens = snippet.tokens();
    mass_share(v, |i| lines.contains(&tokens[i].line))
}

/// Spearman correlation between snippet length in tokens and the share of
/// attention given to the context, over sessions.
pub fn length_context_correlation<F: Scalar>(
    pairs: &[(usize, F)],
) -> Result<Correlation<F>, AnalysisError> {
    let lengths: Vec<F> = pairs.iter().map(|&(n, _)| F::from_count(n as u64)).collect();
    let shares: Vec<F> = pairs.iter().map(|&(_, s)| s).collect();
    spearman_slices(&lengths, &shares)
}
