use crate::code::{Snippet, TokenClass};
use crate::{AttentionVector, Scalar};

use super::AnalysisError;

/// A group of tokens to measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenGroup {
    All,
    Class(TokenClass),
    Tokens(Vec<usize>),
}

impl TokenGroup {
    fn members(&self, snippet: &Snippet) -> Vec<usize> {
        match self {
            TokenGroup::All => (0..snippet.token_count()).collect(),
            TokenGroup::Class(c) => snippet
                .tokens()
                .iter()
                .filter(|t| t.class == *c)
                .map(|t| t.index)
                .collect(),
            TokenGroup::Tokens(ix) => {
                let mut ix: Vec<usize> = ix
                    .iter()
                    .copied()
                    .filter(|&i| i < snippet.token_count())
                    .collect();
                ix.sort_unstable();
                ix.dedup();
                ix
            }
        }
    }
}

/// Distance from uniformity: the group's share of attention divided by its
/// share of tokens. 1 means exactly uniform attention.
pub fn dfu<F: Scalar>(
    snippet: &Snippet,
    v: &AttentionVector<F>,
    group: &TokenGroup,
) -> Result<F, AnalysisError> {
    let members = group.members(snippet);
    if members.is_empty() {
        return Err(AnalysisError::EmptyClass);
    }
    let total = v.total();
    if !(total > F::zero()) {
        return Err(AnalysisError::ZeroMass);
    }
    let mass: F = members.iter().map(|&i| v.weights()[i]).sum();
    let attention_share = mass / total;
    let token_share = F::from_count(members.len() as u64) / F::from_count(v.len() as u64);
    Ok(attention_share / token_share)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfuEntry<F> {
    pub class: TokenClass,
    /// Fraction of the snippet's tokens in this class.
    pub token_share: F,
    pub dfu: F,
}

/// DFU of every token class present in the snippet.
#[derive(Debug, Clone, PartialEq)]
pub struct DfuReport<F> {
    pub entries: Vec<DfuEntry<F>>,
}

pub fn dfu_report<F: Scalar>(snippet: &Snippet, v: &AttentionVector<F>) -> Result<DfuReport<F>, AnalysisError> {
    let n = F::from_count(snippet.token_count() as u64);
    let mut entries = Vec::new();
    for (class, count) in TokenClass::ALL.into_iter().zip(snippet.class_counts()) {
        if count == 0 {
            continue;
        }
        entries.push(DfuEntry {
            class,
            token_share: F::from_count(count as u64) / n,
            dfu: dfu(snippet, v, &TokenGroup::Class(class))?,
        });
    }
    Ok(DfuReport { entries })
}
