use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum AttentionError {
    #[error("weight {index} is negative")]
    Negative { index: usize },
    #[error("weight {index} is not finite")]
    NonFinite { index: usize },
}

/// Per-token non-negative weights over the original tokens of one snippet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawAttentionVector<F>",
    bound(serialize = "F: Scalar", deserialize = "F: Scalar")
)]
pub struct AttentionVector<F> {
    snippet_id: String,
    weights: Vec<F>,
}

#[derive(Deserialize)]
#[serde(bound = "F: Scalar")]
struct RawAttentionVector<F> {
    snippet_id: String,
    weights: Vec<F>,
}

impl<F: Scalar> TryFrom<RawAttentionVector<F>> for AttentionVector<F> {
    type Error = AttentionError;

    fn try_from(raw: RawAttentionVector<F>) -> Result<Self, Self::Error> {
        Self::new(raw.snippet_id, raw.weights)
    }
}

impl<F: Scalar> AttentionVector<F> {
    pub fn new(snippet_id: impl Into<String>, weights: Vec<F>) -> Result<Self, AttentionError> {
        for (index, w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(AttentionError::NonFinite { index });
            }
            if *w < F::zero() {
                return Err(AttentionError::Negative { index });
            }
        }
        Ok(Self {
            snippet_id: snippet_id.into(),
            weights,
        })
    }

    pub fn snippet_id(&self) -> &str {
        &self.snippet_id
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Sum of all weights.
    pub fn total(&self) -> F {
        self.weights.iter().copied().sum()
    }

    pub fn into_weights(self) -> Vec<F> {
        self.weights
    }
}
