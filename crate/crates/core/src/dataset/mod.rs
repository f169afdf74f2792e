//! Seed-set growth: exemplar selection by clustering, LLM augmentation,
//! syntax and novelty filters, a review queue, and on-disk workspaces.

mod blocks;
mod filters;
mod round;
mod workspace;

use serde::{Deserialize, Serialize};

use crate::embed::{ClusterError, StoreError};
use crate::llm::LlmError;
use crate::pair::NlStlPair;
use crate::prompts::PromptError;

pub use blocks::{parse_blocks, Block, ParsedBlocks};
pub use filters::{
    filter_novelty, filter_syntax, novelty_score, NoveltyScore, NoveltyVerdict, SyntaxRejection,
    DEFAULT_NOVELTY_THRESHOLD,
};
pub use round::{generate_candidates, run_round, select_exemplars, Generation};
pub use workspace::{apply_review, AuditEntry, Dataset, DatasetState, QueuedCandidate, ReviewOutcome};

pub(crate) use blocks::clean_formula;

#[derive(Debug, thiserror::Error)]
pub enum DatagenError {
    #[error("backend: {0}")]
    Backend(#[from] LlmError),
    #[error("no NL/STL block could be read from the model response")]
    MalformedResponse { raw: String },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("no queued candidate with id '{0}'")]
    UnknownCandidate(String),
    #[error("more than one decision for '{0}'")]
    DuplicateDecision(String),
    #[error("seed pair '{id}' does not parse: {error}")]
    InvalidSeed { id: String, error: String },
    #[error("workspace: {0}")]
    Workspace(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    /// Candidates requested per round.
    pub candidates: usize,
    /// Candidates per generation request; `None` asks for all at once.
    pub batch: Option<usize>,
    pub exemplars: usize,
    pub novelty_threshold: f64,
    pub seed: u64,
    /// Concurrent generation requests.
    pub jobs: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            candidates: 10,
            batch: None,
            exemplars: 5,
            novelty_threshold: DEFAULT_NOVELTY_THRESHOLD,
            seed: 42,
            jobs: 4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u32,
    pub generated: usize,
    pub syntax_rejected: usize,
    pub novelty_rejected: usize,
    pub queued: usize,
    /// Filled in as the round's candidates are reviewed.
    pub accepted: usize,
    pub review_rejected: usize,
    /// Incomplete blocks in the model output, not counted as generated.
    pub dropped_blocks: usize,
    pub exemplar_ids: Vec<String>,
}

impl RoundReport {
    pub fn reconciles(&self) -> bool {
        self.generated == self.syntax_rejected + self.novelty_rejected + self.queued
            && self.accepted + self.review_rejected <= self.queued
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub id: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default = "default_reviewer")]
    pub reviewer: String,
}

fn default_reviewer() -> String {
    "anonymous".into()
}

impl ReviewDecision {
    pub fn accept(id: &str) -> Self {
        Self {
            id: id.into(),
            verdict: Verdict::Accept,
            reason: None,
            reviewer: default_reviewer(),
        }
    }

    pub fn reject(id: &str, reason: &str) -> Self {
        Self {
            id: id.into(),
            verdict: Verdict::Reject,
            reason: Some(reason.into()),
            reviewer: default_reviewer(),
        }
    }
}

/// Parses a decisions file (JSON Lines).
pub fn read_decisions(text: &str) -> Result<Vec<ReviewDecision>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

/// Seeds with status and canonical formula checked.
pub fn validate_seeds(seeds: Vec<NlStlPair>) -> Result<Vec<NlStlPair>, DatagenError> {
    seeds
        .into_iter()
        .map(|mut p| {
            if let Some(e) = p.parse_error() {
                return Err(DatagenError::InvalidSeed {
                    id: p.id,
                    error: e.to_string(),
                });
            }
            if !p.status.in_pool() {
                p.status = crate::pair::Status::Seed;
            }
            Ok(p)
        })
        .collect()
}
