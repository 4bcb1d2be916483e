use std::net::SocketAddr;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentPolicy {
    /// Least-covered snippets first, ties broken by a seeded shuffle.
    #[default]
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub corpus: PathBuf,
    pub storage_dir: PathBuf,
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    #[serde(default = "default_tasks")]
    pub tasks_per_participant: usize,
    #[serde(default)]
    pub assignment: AssignmentPolicy,
    /// Advisory time per task shown to participants; not enforced.
    #[serde(default = "default_guidance")]
    pub guidance_minutes: u32,
    #[serde(default)]
    pub seed: u64,
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_tasks() -> usize {
    4
}

fn default_guidance() -> u32 {
    15
}

impl StudyConfig {
    pub fn new(corpus: impl Into<PathBuf>, storage_dir: impl Into<PathBuf>) -> Self {
        Self {
            corpus: corpus.into(),
            storage_dir: storage_dir.into(),
            listen: default_listen(),
            tasks_per_participant: default_tasks(),
            assignment: AssignmentPolicy::Balanced,
            guidance_minutes: default_guidance(),
            seed: 0,
        }
    }

    pub fn validate(&self, corpus_len: usize) -> Result<(), ServiceError> {
        if self.tasks_per_participant == 0 || self.tasks_per_participant > corpus_len {
            return Err(ServiceError::Config(format!(
                "tasks_per_participant must be in 1..={corpus_len}, got {}",
                self.tasks_per_participant
            )));
        }
        Ok(())
    }
}
