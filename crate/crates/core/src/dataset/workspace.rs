use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{validate_seeds, DatagenError, NoveltyVerdict, ReviewDecision, RoundReport, Verdict};
use crate::embed::{EmbedField, HashedTfIdf, KnowledgeStore, DEFAULT_DIM};
use crate::fsutil::write_atomic;
use crate::pair::{read_jsonl, NlStlPair, Status};

pub const DATASET_FILE: &str = "dataset.jsonl";
pub const VECTORS_FILE: &str = "dataset.vec";
pub const QUEUE_FILE: &str = "queue.jsonl";
pub const AUDIT_FILE: &str = "audit.jsonl";
pub const STATE_FILE: &str = "state.json";

/// A filtered candidate waiting for review, with its novelty evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueuedCandidate {
    #[serde(flatten)]
    pub pair: NlStlPair,
    /// Highest ROUGE-L against the pool at filtering time.
    pub novelty: f64,
    #[serde(default)]
    pub nearest_id: Option<String>,
}

impl From<NoveltyVerdict> for QueuedCandidate {
    fn from(v: NoveltyVerdict) -> Self {
        Self {
            pair: v.pair,
            novelty: v.score.max_rouge_l,
            nearest_id: v.score.nearest_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub decision: ReviewDecision,
    pub pair: NlStlPair,
    pub novelty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetState {
    pub next_round: u32,
    pub reports: Vec<RoundReport>,
}

impl Default for DatasetState {
    fn default() -> Self {
        Self {
            next_round: 1,
            reports: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReviewOutcome {
    pub accepted: Vec<String>,
    pub rejected: Vec<String>,
}

/// Everything but the store, staged before a commit.
pub(crate) struct Staged {
    pub pool: Option<Vec<NlStlPair>>,
    pub queue: Vec<QueuedCandidate>,
    pub audit: Vec<AuditEntry>,
    pub state: DatasetState,
}

/// The growing dataset: the pool of seed and accepted pairs (embedded for
/// clustering and retrieval), the review queue, the audit log and round
/// bookkeeping. With a directory attached every commit is persisted.
#[derive(Debug)]
pub struct Dataset {
    dir: Option<PathBuf>,
    pub(crate) store: KnowledgeStore,
    pub(crate) queue: Vec<QueuedCandidate>,
    pub(crate) audit: Vec<AuditEntry>,
    pub(crate) state: DatasetState,
}

fn lines<T: Serialize>(items: &[T]) -> String {
    let mut s = String::new();
    for it in items {
        s.push_str(&serde_json::to_string(it).expect("record serializes"));
        s.push('\n');
    }
    s
}

fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, DatagenError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect::<Result<_, _>>()?)
}

fn new_store(pairs: Vec<NlStlPair>) -> Result<KnowledgeStore, DatagenError> {
    let mut s = KnowledgeStore::new(Box::new(HashedTfIdf::new(DEFAULT_DIM)), EmbedField::Pair);
    s.add(pairs)?;
    Ok(s)
}

impl Dataset {
    /// A dataset that lives only in memory.
    pub fn in_memory(seeds: Vec<NlStlPair>) -> Result<Self, DatagenError> {
        Ok(Self {
            dir: None,
            store: new_store(validate_seeds(seeds)?)?,
            queue: Vec::new(),
            audit: Vec::new(),
            state: DatasetState::default(),
        })
    }

    /// Creates a workspace directory from seed pairs. Fails if one exists.
    pub fn init(dir: &Path, seeds: Vec<NlStlPair>) -> Result<Self, DatagenError> {
        if dir.join(STATE_FILE).exists() {
            return Err(DatagenError::Workspace(format!("{} already holds a dataset", dir.display())));
        }
        std::fs::create_dir_all(dir)?;
        let mut ds = Self::in_memory(seeds)?;
        ds.dir = Some(dir.to_path_buf());
        ds.save()?;
        Ok(ds)
    }

    pub fn open(dir: &Path) -> Result<Self, DatagenError> {
        let state_path = dir.join(STATE_FILE);
        if !state_path.exists() {
            return Err(DatagenError::Workspace(format!("no dataset in {}", dir.display())));
        }
        let state: DatasetState = serde_json::from_str(&std::fs::read_to_string(state_path)?)?;
        let (store, _) = KnowledgeStore::load(
            &dir.join(DATASET_FILE),
            &dir.join(VECTORS_FILE),
            Box::new(HashedTfIdf::new(DEFAULT_DIM)),
            EmbedField::Pair,
        )?;
        Ok(Self {
            dir: Some(dir.to_path_buf()),
            store,
            queue: read_lines(&dir.join(QUEUE_FILE))?,
            audit: read_lines(&dir.join(AUDIT_FILE))?,
            state,
        })
    }

    /// Seeds read from JSON Lines text.
    pub fn seeds_from_jsonl(text: &str) -> Result<Vec<NlStlPair>, DatagenError> {
        Ok(read_jsonl(text)?)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn store(&self) -> &KnowledgeStore {
        &self.store
    }

    /// Seed and accepted pairs.
    pub fn pool(&self) -> &[NlStlPair] {
        self.store.pairs()
    }

    pub fn queue(&self) -> &[QueuedCandidate] {
        &self.queue
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    pub fn state(&self) -> &DatasetState {
        &self.state
    }

    pub fn save(&self) -> Result<(), DatagenError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        self.store.save(&dir.join(DATASET_FILE), &dir.join(VECTORS_FILE))?;
        self.write_rest(dir, &self.queue, &self.audit, &self.state)
    }

    fn write_rest(
        &self,
        dir: &Path,
        queue: &[QueuedCandidate],
        audit: &[AuditEntry],
        state: &DatasetState,
    ) -> Result<(), DatagenError> {
        write_atomic(&dir.join(QUEUE_FILE), lines(queue).as_bytes())?;
        write_atomic(&dir.join(AUDIT_FILE), lines(audit).as_bytes())?;
        write_atomic(&dir.join(STATE_FILE), serde_json::to_string_pretty(state)?.as_bytes())?;
        Ok(())
    }

    pub(crate) fn stage(&self) -> Staged {
        Staged {
            pool: None,
            queue: self.queue.clone(),
            audit: self.audit.clone(),
            state: self.state.clone(),
        }
    }

    /// Builds the new store, persists everything, then swaps it in. Nothing
    /// changes in memory when any step fails.
    pub(crate) fn commit(&mut self, staged: Staged) -> Result<(), DatagenError> {
        let store = match staged.pool {
            Some(pairs) => Some(new_store(pairs)?),
            None => None,
        };
        if let Some(dir) = &self.dir {
            if let Some(s) = &store {
                s.save(&dir.join(DATASET_FILE), &dir.join(VECTORS_FILE))?;
            }
            self.write_rest(dir, &staged.queue, &staged.audit, &staged.state)?;
        }
        if let Some(s) = store {
            self.store = s;
        }
        self.queue = staged.queue;
        self.audit = staged.audit;
        self.state = staged.state;
        Ok(())
    }
}

/// Applies review decisions to queued candidates. Accepted pairs join the
/// pool; every decision is logged. All decisions are checked before
/// anything changes.
pub fn apply_review(ds: &mut Dataset, decisions: &[ReviewDecision]) -> Result<ReviewOutcome, DatagenError> {
    let queued: HashSet<&str> = ds.queue.iter().map(|q| q.pair.id.as_str()).collect();
    let mut seen = HashSet::new();
    for d in decisions {
        if !queued.contains(d.id.as_str()) {
            return Err(DatagenError::UnknownCandidate(d.id.clone()));
        }
        if !seen.insert(d.id.as_str()) {
            return Err(DatagenError::DuplicateDecision(d.id.clone()));
        }
    }
    let by_id: BTreeMap<&str, &ReviewDecision> = decisions.iter().map(|d| (d.id.as_str(), d)).collect();

    let mut staged = ds.stage();
    let mut pool = ds.store.pairs().to_vec();
    let mut outcome = ReviewOutcome::default();
    let mut remaining = Vec::new();
    for q in std::mem::take(&mut staged.queue) {
        let Some(d) = by_id.get(q.pair.id.as_str()) else {
            remaining.push(q);
            continue;
        };
        let mut pair = q.pair;
        let report = staged.state.reports.iter_mut().find(|r| r.round == pair.round);
        match d.verdict {
            Verdict::Accept => {
                pair.status = Status::Accepted;
                pool.push(pair.clone());
                outcome.accepted.push(pair.id.clone());
                if let Some(r) = report {
                    r.accepted += 1;
                }
            }
            Verdict::Reject => {
                pair.status = Status::Rejected;
                outcome.rejected.push(pair.id.clone());
                if let Some(r) = report {
                    r.review_rejected += 1;
                }
            }
        }
        staged.audit.push(AuditEntry {
            decision: (*d).clone(),
            pair,
            novelty: q.novelty,
        });
    }
    staged.queue = remaining;
    if !outcome.accepted.is_empty() {
        staged.pool = Some(pool);
    }
    ds.commit(staged)?;
    Ok(outcome)
}
