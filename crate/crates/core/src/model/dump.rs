use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::Snippet;
use crate::Scalar;

pub const DUMP_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("dump has no attention steps")]
    EmptyDump,
    #[error("dump has no copy attention")]
    MissingCopyAttention,
    #[error("step {step}: node `{node}` span {start}..={end} outside 0..{token_count}")]
    SpanError {
        step: usize,
        node: String,
        start: usize,
        end: usize,
        token_count: usize,
    },
    #[error("step {step}: terminal node `{node}` must span exactly one token")]
    TerminalSpan { step: usize, node: String },
    #[error("step {step}: {len} weights for {token_count} tokens")]
    LengthMismatch {
        step: usize,
        len: usize,
        token_count: usize,
    },
    #[error("step {step}: weight must be finite and non-negative")]
    BadWeight { step: usize },
    #[error("dump is for snippet `{dump}`, not `{snippet}`")]
    SnippetMismatch { dump: String, snippet: String },
    #[error("unsupported dump format_version {0}")]
    Version(u32),
}

/// Inclusive token index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
}

impl From<[usize; 2]> for TokenSpan {
    fn from([start, end]: [usize; 2]) -> Self {
        Self { start, end }
    }
}

impl From<TokenSpan> for [usize; 2] {
    fn from(s: TokenSpan) -> Self {
        [s.start, s.end]
    }
}

impl TokenSpan {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Attention on one AST node in one output step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct NodeAttention<F> {
    pub node_id: String,
    pub weight: F,
    pub span: TokenSpan,
    pub is_terminal: bool,
    /// Attention paid directly to a terminal node rather than inherited.
    #[serde(default)]
    pub direct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "F: Scalar")]
pub enum DumpAttention<F> {
    /// One weight per snippet token per output step.
    TokenLevel {
        steps: Vec<Vec<F>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        copy_steps: Option<Vec<Vec<F>>>,
    },
    /// Node weights with token spans per output step.
    NodeLevel {
        steps: Vec<Vec<NodeAttention<F>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        copy_steps: Option<Vec<Vec<NodeAttention<F>>>>,
    },
}

/// Attention recorded from one model predicting a fix for one snippet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct ModelAttentionDump<F> {
    pub format_version: u32,
    pub snippet_id: String,
    pub model_id: String,
    /// Rank of the prediction the attention belongs to; 0 is the most likely.
    #[serde(default)]
    pub prediction_rank: u32,
    #[serde(flatten)]
    pub attention: DumpAttention<F>,
}

fn check_weight<F: Scalar>(w: F, step: usize) -> Result<(), ModelError> {
    if w.is_finite() && w >= F::zero() {
        Ok(())
    } else {
        Err(ModelError::BadWeight { step })
    }
}

pub(crate) fn check_nodes<F: Scalar>(
    nodes: &[NodeAttention<F>],
    step: usize,
    token_count: usize,
) -> Result<(), ModelError> {
    for node in nodes {
        check_weight(node.weight, step)?;
        let TokenSpan { start, end } = node.span;
        if start > end || end >= token_count {
            return Err(ModelError::SpanError {
                step,
                node: node.node_id.clone(),
                start,
                end,
                token_count,
            });
        }
        if node.is_terminal && start != end {
            return Err(ModelError::TerminalSpan {
                step,
                node: node.node_id.clone(),
            });
        }
    }
    Ok(())
}

pub(crate) fn check_tokens<F: Scalar>(
    weights: &[F],
    step: usize,
    token_count: usize,
) -> Result<(), ModelError> {
    if weights.len() != token_count {
        return Err(ModelError::LengthMismatch {
            step,
            len: weights.len(),
            token_count,
        });
    }
    weights.iter().try_for_each(|&w| check_weight(w, step))
}

impl<F: Scalar> ModelAttentionDump<F> {
    pub fn token_level(
        snippet_id: impl Into<String>,
        model_id: impl Into<String>,
        steps: Vec<Vec<F>>,
    ) -> Self {
        Self {
            format_version: DUMP_FORMAT_VERSION,
            snippet_id: snippet_id.into(),
            model_id: model_id.into(),
            prediction_rank: 0,
            attention: DumpAttention::TokenLevel {
                steps,
                copy_steps: None,
            },
        }
    }

    pub fn node_level(
        snippet_id: impl Into<String>,
        model_id: impl Into<String>,
        steps: Vec<Vec<NodeAttention<F>>>,
    ) -> Self {
        Self {
            format_version: DUMP_FORMAT_VERSION,
            snippet_id: snippet_id.into(),
            model_id: model_id.into(),
            prediction_rank: 0,
            attention: DumpAttention::NodeLevel {
                steps,
                copy_steps: None,
            },
        }
    }

    /// Number of recorded output steps.
    pub fn step_count(&self) -> usize {
        match &self.attention {
            DumpAttention::TokenLevel { steps, .. } => steps.len(),
            DumpAttention::NodeLevel { steps, .. } => steps.len(),
        }
    }

    pub fn has_copy_attention(&self) -> bool {
        match &self.attention {
            DumpAttention::TokenLevel { copy_steps, .. } => copy_steps.is_some(),
            DumpAttention::NodeLevel { copy_steps, .. } => copy_steps.is_some(),
        }
    }

    /// Validates the dump against the snippet it refers to.
    pub fn validate(&self, snippet: &Snippet) -> Result<(), ModelError> {
        if self.format_version != DUMP_FORMAT_VERSION {
            return Err(ModelError::Version(self.format_version));
        }
        if self.snippet_id != snippet.id() {
            return Err(ModelError::SnippetMismatch {
                dump: self.snippet_id.clone(),
                snippet: snippet.id().to_owned(),
            });
        }
        let n = snippet.token_count();
        match &self.attention {
            DumpAttention::TokenLevel { steps, copy_steps } => steps
                .iter()
                .chain(copy_steps.iter().flatten())
                .enumerate()
                .try_for_each(|(i, s)| check_tokens(s, i, n)),
            DumpAttention::NodeLevel { steps, copy_steps } => steps
                .iter()
                .chain(copy_steps.iter().flatten())
                .enumerate()
                .try_for_each(|(i, s)| check_nodes(s, i, n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_form() {
        let json = r#"{
            "format_version": 1, "snippet_id": "s", "model_id": "recoder", "kind": "node_level",
            "steps": [[{"node_id": "bin", "weight": 15.0, "span": [0, 2], "is_terminal": false},
                       {"node_id": "a", "weight": 3.0, "span": [0, 0], "is_terminal": true, "direct": true}]]
        }"#;
        let dump: ModelAttentionDump<f64> = serde_json::from_str(json).unwrap();
        assert_eq!(dump.step_count(), 1);
        assert!(!dump.has_copy_attention());
        let snippet = Snippet::new("s", "a + b", 1, "").unwrap();
        dump.validate(&snippet).unwrap();
        let round: ModelAttentionDump<f64> =
            serde_json::from_str(&serde_json::to_string(&dump).unwrap()).unwrap();
        assert_eq!(round, dump);
    }

    #[test]
    fn validation_errors() {
        let snippet = Snippet::new("s", "a + b", 1, "").unwrap();
        let short = ModelAttentionDump::token_level("s", "m", vec![vec![1.0f64, 2.0]]);
        assert!(matches!(short.validate(&snippet), Err(ModelError::LengthMismatch { .. })));
        let neg = ModelAttentionDump::token_level("s", "m", vec![vec![1.0f64, -2.0, 0.0]]);
        assert_eq!(neg.validate(&snippet), Err(ModelError::BadWeight { step: 0 }));
        let node = |span: [usize; 2], is_terminal| NodeAttention {
            node_id: "n".into(),
            weight: 1.0f64,
            span: span.into(),
            is_terminal,
            direct: false,
        };
        let wide = ModelAttentionDump::node_level("s", "m", vec![vec![node([1, 3], false)]]);
        assert!(matches!(wide.validate(&snippet), Err(ModelError::SpanError { .. })));
        let term = ModelAttentionDump::node_level("s", "m", vec![vec![node([0, 1], true)]]);
        assert!(matches!(term.validate(&snippet), Err(ModelError::TerminalSpan { .. })));
        let other = ModelAttentionDump::token_level("t", "m", vec![vec![1.0f64; 3]]);
        assert!(matches!(other.validate(&snippet), Err(ModelError::SnippetMismatch { .. })));
    }
}
