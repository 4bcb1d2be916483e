use crate::code::Snippet;
use crate::Scalar;

use super::dump::{check_nodes, ModelError, NodeAttention};

/// Token-level attention of one node-level step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedStep<F> {
    pub weights: Vec<F>,
}

/// Spreads each node's weight evenly over the tokens its span covers.
///
/// Contributions add up per token, so a terminal's direct attention is summed
/// with whatever its ancestors pass down.
pub fn project_node_step<F: Scalar>(
    snippet: &Snippet,
    nodes: &[NodeAttention<F>],
) -> Result<ProjectedStep<F>, ModelError> {
    project_onto(snippet.token_count(), nodes, 0)
}

pub(crate) fn project_onto<F: Scalar>(
    token_count: usize,
    nodes: &[NodeAttention<F>],
    step: usize,
) -> Result<ProjectedStep<F>, ModelError> {
    check_nodes(nodes, step, token_count)?;
    let mut weights = vec![F::zero(); token_count];
    for node in nodes {
        let share = node.weight / F::from_count(node.span.len() as u64);
        for w in &mut weights[node.span.start..=node.span.end] {
            *w = *w + share;
        }
    }
    Ok(ProjectedStep { weights })
}
