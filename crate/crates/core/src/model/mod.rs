//! Neural-model attention dumps and their reduction to per-token vectors.

mod aggregate;
mod dump;
mod projection;

pub use aggregate::{aggregate, copy_attention, mean_of_steps};
pub use dump::{
    DumpAttention, ModelAttentionDump, ModelError, NodeAttention, TokenSpan, DUMP_FORMAT_VERSION,
};
pub use projection::{project_node_step, ProjectedStep};
