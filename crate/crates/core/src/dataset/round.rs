use std::thread;

use super::{filter_novelty, filter_syntax, parse_blocks, Dataset, DatagenError, DatasetConfig, QueuedCandidate, RoundReport};
use crate::embed::{kmeans, KnowledgeStore};
use crate::llm::ChatBackend;
use crate::pair::{NlStlPair, Source, Status};
use crate::prompts::{format_pairs, PromptKind, PromptSet};

/// Cluster exemplars of the store, in cluster order.
pub fn select_exemplars(store: &KnowledgeStore, k: usize, seed: u64) -> Result<Vec<NlStlPair>, DatagenError> {
    let c = kmeans(store, k, seed)?;
    Ok(c.exemplars.iter().map(|&i| store.pairs()[i].clone()).collect())
}

/// Candidates read from one model response.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub candidates: Vec<NlStlPair>,
    pub dropped: usize,
    pub raw: String,
}

/// One evolution request for `n` pairs. Candidate ids are
/// `r{round}-{index:03}` counting up from `first_index`.
pub fn generate_candidates(
    prompts: &PromptSet,
    exemplars: &[NlStlPair],
    backend: &dyn ChatBackend,
    n: usize,
    round: u32,
    first_index: usize,
) -> Result<Generation, DatagenError> {
    let req = prompts.request(
        PromptKind::Evolution,
        &[("exemplars", format_pairs(exemplars)), ("count", n.to_string())],
    )?;
    let resp = backend.complete(&req)?;
    let parsed = parse_blocks(&resp.text);
    if parsed.blocks.is_empty() {
        return Err(DatagenError::MalformedResponse { raw: resp.text });
    }
    let candidates = parsed
        .blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            NlStlPair::new(format!("r{round}-{:03}", first_index + i), b.nl, b.stl)
                .with_domain(b.domain.unwrap_or_else(|| "other".into()))
                .with_origin(Source::Generated, round, Status::Candidate)
        })
        .collect();
    Ok(Generation {
        candidates,
        dropped: parsed.dropped,
        raw: resp.text,
    })
}

fn batch_sizes(cfg: &DatasetConfig) -> Vec<usize> {
    let b = cfg.batch.unwrap_or(cfg.candidates).max(1);
    let mut left = cfg.candidates;
    let mut out = Vec::new();
    while left > 0 {
        out.push(b.min(left));
        left -= b.min(left);
    }
    out
}

/// Runs every generation request, at most `jobs` at a time, keeping the
/// results in request order.
fn generate_all(
    prompts: &PromptSet,
    exemplars: &[NlStlPair],
    backend: &dyn ChatBackend,
    cfg: &DatasetConfig,
    round: u32,
) -> Result<Vec<Generation>, DatagenError> {
    let sizes = batch_sizes(cfg);
    let mut out = Vec::with_capacity(sizes.len());
    for wave in sizes.chunks(cfg.jobs.max(1)) {
        let results: Vec<Result<Generation, DatagenError>> = thread::scope(|s| {
            let handles: Vec<_> = wave
                .iter()
                .map(|&n| s.spawn(move || generate_candidates(prompts, exemplars, backend, n, round, 1)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("generation thread panicked")).collect()
        });
        for r in results {
            out.push(r?);
        }
    }
    // Renumber so ids run on across requests.
    let mut next = 1;
    for g in &mut out {
        for c in &mut g.candidates {
            c.id = format!("r{round}-{next:03}");
            next += 1;
        }
    }
    Ok(out)
}

/// One augmentation round. The dataset is changed only when every step
/// succeeds; survivors are appended to the review queue.
pub fn run_round(
    ds: &mut Dataset,
    backend: &dyn ChatBackend,
    prompts: &PromptSet,
    cfg: &DatasetConfig,
) -> Result<RoundReport, DatagenError> {
    let round = ds.state.next_round;
    let exemplars = select_exemplars(&ds.store, cfg.exemplars, cfg.seed.wrapping_add(round as u64))?;
    let generations = generate_all(prompts, &exemplars, backend, cfg, round)?;

    let dropped_blocks = generations.iter().map(|g| g.dropped).sum();
    let candidates: Vec<NlStlPair> = generations.into_iter().flat_map(|g| g.candidates).collect();
    let generated = candidates.len();
    let (syntax_ok, syntax_bad) = filter_syntax(candidates);

    let mut pool: Vec<NlStlPair> = ds.store.pairs().to_vec();
    pool.extend(ds.queue.iter().map(|q| q.pair.clone()));
    let (novel, stale) = filter_novelty(syntax_ok, &pool, cfg.novelty_threshold);

    for r in &syntax_bad {
        tracing::debug!(id = %r.pair.id, stl = %r.pair.stl, "syntax rejected");
    }
    for v in &stale {
        tracing::debug!(id = %v.pair.id, score = v.score.max_rouge_l, "novelty rejected");
    }

    let report = RoundReport {
        round,
        generated,
        syntax_rejected: syntax_bad.len(),
        novelty_rejected: stale.len(),
        queued: novel.len(),
        accepted: 0,
        review_rejected: 0,
        dropped_blocks,
        exemplar_ids: exemplars.iter().map(|p| p.id.clone()).collect(),
    };
    debug_assert!(report.reconciles());

    let mut next = ds.stage();
    next.queue.extend(novel.into_iter().map(QueuedCandidate::from));
    next.state.next_round += 1;
    next.state.reports.push(report.clone());
    ds.commit(next)?;
    Ok(report)
}
