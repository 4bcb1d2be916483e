use crate::code::Snippet;
use crate::{AttentionVector, Scalar};

use super::dump::{check_tokens, DumpAttention, ModelAttentionDump, ModelError};
use super::projection::project_onto;

/// Element-wise mean of equally long steps.
///
/// Uses a running mean so that k identical steps reproduce the step exactly;
/// each entry is clamped into the range of its per-step values.
pub fn mean_of_steps<F: Scalar>(steps: &[Vec<F>]) -> Result<Vec<F>, ModelError> {
    let first = steps.first().ok_or(ModelError::EmptyDump)?;
    let mut mean = first.clone();
    let mut lo = first.clone();
    let mut hi = first.clone();
    for (k, step) in steps.iter().enumerate().skip(1) {
        let count = F::from_count(k as u64 + 1);
        for (i, &x) in step.iter().enumerate() {
            mean[i] = mean[i] + (x - mean[i]) / count;
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    for i in 0..mean.len() {
        mean[i] = mean[i].max(lo[i]).min(hi[i]);
    }
    Ok(mean)
}

fn reduce<F: Scalar>(
    snippet: &Snippet,
    attention: &DumpAttention<F>,
    copy: bool,
) -> Result<AttentionVector<F>, ModelError> {
    let n = snippet.token_count();
    let token_steps: Vec<Vec<F>> = match attention {
        DumpAttention::TokenLevel { steps, copy_steps } => {
            let steps = if copy {
                copy_steps.as_ref().ok_or(ModelError::MissingCopyAttention)?
            } else {
                steps
            };
            for (i, s) in steps.iter().enumerate() {
                check_tokens(s, i, n)?;
            }
            steps.clone()
        }
        DumpAttention::NodeLevel { steps, copy_steps } => {
            let steps = if copy {
                copy_steps.as_ref().ok_or(ModelError::MissingCopyAttention)?
            } else {
                steps
            };
            steps
                .iter()
                .enumerate()
                .map(|(i, s)| project_onto(n, s, i).map(|p| p.weights))
                .collect::<Result<_, _>>()?
        }
    };
    let mean = mean_of_steps(&token_steps)?;
    Ok(AttentionVector::new(snippet.id(), mean).expect("mean of valid weights is valid"))
}

fn check_snippet<F: Scalar>(snippet: &Snippet, dump: &ModelAttentionDump<F>) -> Result<(), ModelError> {
    if dump.snippet_id != snippet.id() {
        return Err(ModelError::SnippetMismatch {
            dump: dump.snippet_id.clone(),
            snippet: snippet.id().to_owned(),
        });
    }
    Ok(())
}

/// Model attention: the mean over all output steps of the per-token weights,
/// projecting node-level steps onto tokens first.
pub fn aggregate<F: Scalar>(
    snippet: &Snippet,
    dump: &ModelAttentionDump<F>,
) -> Result<AttentionVector<F>, ModelError> {
    check_snippet(snippet, dump)?;
    reduce(snippet, &dump.attention, false)
}

/// The same reduction applied to the copy-attention steps.
pub fn copy_attention<F: Scalar>(
    snippet: &Snippet,
    dump: &ModelAttentionDump<F>,
) -> Result<AttentionVector<F>, ModelError> {
    check_snippet(snippet, dump)?;
    reduce(snippet, &dump.attention, true)
}
