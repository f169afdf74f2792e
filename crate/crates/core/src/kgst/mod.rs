//! Generate-then-refine translation of sentences into formulas: a generator
//! drafts a preliminary formula, reference pairs are retrieved from a
//! knowledge store, and a refiner corrects the draft. Every refined output
//! is validated, falling back to the last valid formula.

mod bench;
mod extract;

use std::str::FromStr;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::embed::{KnowledgeStore, StoreError};
use crate::llm::{ChatBackend, ChatRequest, LlmError};
use crate::pair::NlStlPair;
use crate::prompts::{format_pairs, PromptError, PromptKind, PromptSet};
use crate::syntax::{format, parse, Formula};

pub use bench::{bench, BenchReport, BenchRow};
pub use extract::extract_formula;

pub const DEFAULT_K: usize = 5;
pub const GENERATION_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Generator draft, retrieval, refinement.
    #[default]
    Kgst,
    /// Draft written in context from the references, then refined.
    NoFinetune,
    /// Generator draft only.
    NoRefine,
    /// Generator draft, then feedback and revision by the refiner without
    /// references.
    SelfRefine,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Kgst, Mode::NoFinetune, Mode::NoRefine, Mode::SelfRefine];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Kgst => "kgst",
            Mode::NoFinetune => "no-finetune",
            Mode::NoRefine => "no-refine",
            Mode::SelfRefine => "self-refine",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode '{s}' (kgst, no-finetune, no-refine, self-refine)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRequest {
    pub nl: String,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub mode: Mode,
}

fn default_k() -> usize {
    DEFAULT_K
}

fn default_iterations() -> usize {
    1
}

impl TransformRequest {
    pub fn new(nl: impl Into<String>, mode: Mode) -> Self {
        Self {
            nl: nl.into(),
            k: DEFAULT_K,
            iterations: 1,
            mode,
        }
    }
}

/// One backend call as sent and answered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub stage: String,
    pub backend: String,
    pub prompt: String,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub pair: NlStlPair,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformResult {
    pub nl: String,
    pub mode: Mode,
    pub preliminary: String,
    pub references: Vec<Reference>,
    /// Output of the last refinement stage before validation.
    pub refined: String,
    /// Canonical rendering of `formula`.
    #[serde(rename = "final")]
    pub final_stl: String,
    #[serde(skip)]
    pub formula: Formula,
    pub fallback_used: bool,
    pub transcript: Vec<Exchange>,
}

#[derive(Debug, thiserror::Error)]
pub enum KgstError {
    #[error("backend failed during {stage}: {source}")]
    Backend {
        stage: String,
        #[source]
        source: LlmError,
        transcript: Vec<Exchange>,
    },
    #[error("no valid formula after {} attempts; last output: {last_raw:?}", transcript.len())]
    AllRetriesInvalid { last_raw: String, transcript: Vec<Exchange> },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl KgstError {
    pub fn transcript(&self) -> &[Exchange] {
        match self {
            KgstError::Backend { transcript, .. } | KgstError::AllRetriesInvalid { transcript, .. } => transcript,
            _ => &[],
        }
    }

    pub fn is_backend(&self) -> bool {
        matches!(self, KgstError::Backend { .. })
    }
}

/// Backends and prompts shared by every stage.
#[derive(Clone, Copy)]
pub struct Stages<'a> {
    pub generator: &'a dyn ChatBackend,
    pub refiner: &'a dyn ChatBackend,
    pub prompts: &'a PromptSet,
}

struct Log(Vec<Exchange>);

impl Log {
    fn call(&mut self, backend: &dyn ChatBackend, req: ChatRequest) -> Result<String, KgstError> {
        match backend.complete(&req) {
            Ok(resp) => {
                self.0.push(Exchange {
                    stage: req.tag,
                    backend: resp.backend_id,
                    prompt: req.user_prompt,
                    response: resp.text.clone(),
                });
                Ok(resp.text)
            }
            Err(source) => Err(KgstError::Backend {
                stage: req.tag,
                source,
                transcript: std::mem::take(&mut self.0),
            }),
        }
    }
}

fn references_text(refs: &[Reference]) -> String {
    if refs.is_empty() {
        return "(none)".into();
    }
    let pairs: Vec<NlStlPair> = refs.iter().map(|r| r.pair.clone()).collect();
    format_pairs(&pairs)
}

fn draft(log: &mut Log, backend: &dyn ChatBackend, req: &ChatRequest) -> Result<String, KgstError> {
    let mut last = String::new();
    for _ in 0..GENERATION_ATTEMPTS {
        last = log.call(backend, req.clone())?;
        if let Some(f) = extract_formula(&last) {
            return Ok(f);
        }
    }
    Err(KgstError::AllRetriesInvalid {
        last_raw: last,
        transcript: std::mem::take(&mut log.0),
    })
}

fn generate_in(log: &mut Log, nl: &str, backend: &dyn ChatBackend, prompts: &PromptSet) -> Result<String, KgstError> {
    let req = prompts.request(PromptKind::Generate, &[("nl", nl.to_string())])?;
    draft(log, backend, &req)
}

/// Preliminary formula from the generator, retried on unusable output.
pub fn generate_preliminary(
    nl: &str,
    generator: &dyn ChatBackend,
    prompts: &PromptSet,
) -> Result<(String, Vec<Exchange>), KgstError> {
    let mut log = Log(Vec::new());
    let f = generate_in(&mut log, nl, generator, prompts)?;
    Ok((f, log.0))
}

/// The `k` stored pairs most similar to the sentence; none for an empty
/// store.
pub fn retrieve_references(nl: &str, store: &KnowledgeStore, k: usize) -> Result<Vec<Reference>, KgstError> {
    if store.is_empty() || k == 0 {
        return Ok(Vec::new());
    }
    Ok(store
        .top_k(nl, k)?
        .into_iter()
        .map(|h| Reference {
            pair: h.pair,
            score: h.score,
        })
        .collect())
}

/// A refinement stage's output: the validated formula and whether the
/// input had to be kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refined {
    pub raw: String,
    pub formula: String,
    pub fallback: bool,
}

fn validated(raw: String, input: &str) -> Refined {
    match extract_formula(&raw) {
        Some(f) => Refined {
            raw,
            formula: f,
            fallback: false,
        },
        None => Refined {
            raw,
            formula: input.to_string(),
            fallback: true,
        },
    }
}

fn refine_in(
    log: &mut Log,
    nl: &str,
    preliminary: &str,
    refs: &[Reference],
    refiner: &dyn ChatBackend,
    prompts: &PromptSet,
) -> Result<Refined, KgstError> {
    let req = prompts.request(
        PromptKind::Refine,
        &[
            ("nl", nl.to_string()),
            ("preliminary", preliminary.to_string()),
            ("references", references_text(refs)),
        ],
    )?;
    Ok(validated(log.call(refiner, req)?, preliminary))
}

/// One reference-guided refinement of `preliminary`.
pub fn refine(
    nl: &str,
    preliminary: &str,
    references: &[Reference],
    refiner: &dyn ChatBackend,
    prompts: &PromptSet,
) -> Result<(Refined, Vec<Exchange>), KgstError> {
    let mut log = Log(Vec::new());
    let r = refine_in(&mut log, nl, preliminary, references, refiner, prompts)?;
    Ok((r, log.0))
}

fn self_refine_in(
    log: &mut Log,
    nl: &str,
    preliminary: &str,
    backend: &dyn ChatBackend,
    prompts: &PromptSet,
) -> Result<Refined, KgstError> {
    let base = [("nl", nl.to_string()), ("preliminary", preliminary.to_string())];
    let feedback = log.call(backend, prompts.request(PromptKind::Feedback, &base)?)?;
    let mut vars = base.to_vec();
    vars.push(("feedback", feedback.trim().to_string()));
    let raw = log.call(backend, prompts.request(PromptKind::SelfRefine, &vars)?)?;
    Ok(validated(raw, preliminary))
}

/// Feedback on `preliminary` from the backend itself, then a revision
/// guided by that feedback.
pub fn self_refine(
    nl: &str,
    preliminary: &str,
    backend: &dyn ChatBackend,
    prompts: &PromptSet,
) -> Result<(Refined, Vec<Exchange>), KgstError> {
    let mut log = Log(Vec::new());
    let r = self_refine_in(&mut log, nl, preliminary, backend, prompts)?;
    Ok((r, log.0))
}

/// Runs the stages of `req.mode`. Refinement repeats `req.iterations` times
/// on the latest formula against the same references.
pub fn transform(req: &TransformRequest, stages: Stages<'_>, store: &KnowledgeStore) -> Result<TransformResult, KgstError> {
    let mut log = Log(Vec::new());
    let nl = req.nl.trim();
    let prompts = stages.prompts;

    let (preliminary, references) = match req.mode {
        Mode::Kgst => {
            let p = generate_in(&mut log, nl, stages.generator, prompts)?;
            (p, retrieve_references(nl, store, req.k)?)
        }
        Mode::NoFinetune => {
            let refs = retrieve_references(nl, store, req.k)?;
            let r = prompts.request(
                PromptKind::InContext,
                &[("nl", nl.to_string()), ("references", references_text(&refs))],
            )?;
            (draft(&mut log, stages.refiner, &r)?, refs)
        }
        Mode::NoRefine | Mode::SelfRefine => (generate_in(&mut log, nl, stages.generator, prompts)?, Vec::new()),
    };

    let mut current = preliminary.clone();
    let mut refined = preliminary.clone();
    let mut fallback_used = false;
    if req.mode != Mode::NoRefine {
        for _ in 0..req.iterations {
            let r = match req.mode {
                Mode::SelfRefine => self_refine_in(&mut log, nl, &current, stages.refiner, prompts)?,
                _ => refine_in(&mut log, nl, &current, &references, stages.refiner, prompts)?,
            };
            fallback_used |= r.fallback;
            refined = r.raw;
            current = r.formula;
        }
    }

    // Drafts and refinements are only accepted after a syntax check, so the
    // surviving formula always parses.
    let formula = parse(&current).expect("validated formula parses");
    Ok(TransformResult {
        nl: nl.to_string(),
        mode: req.mode,
        preliminary,
        references,
        refined,
        final_stl: format(&formula),
        formula,
        fallback_used,
        transcript: log.0,
    })
}

/// Transforms every request, at most `jobs` at a time; results keep the
/// input order.
pub fn transform_batch(
    reqs: &[TransformRequest],
    stages: Stages<'_>,
    store: &KnowledgeStore,
    jobs: usize,
) -> Vec<Result<TransformResult, KgstError>> {
    let mut out = Vec::with_capacity(reqs.len());
    for wave in reqs.chunks(jobs.max(1)) {
        let results: Vec<_> = thread::scope(|s| {
            let handles: Vec<_> = wave.iter().map(|r| s.spawn(move || transform(r, stages, store))).collect();
            handles.into_iter().map(|h| h.join().expect("transform thread panicked")).collect()
        });
        out.extend(results);
    }
    out
}
