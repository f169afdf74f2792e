use serde::Serialize;

use super::{transform_batch, Mode, Stages, TransformRequest, TransformResult};
use crate::embed::KnowledgeStore;
use crate::metrics::{score_corpus, EvalReport, MetricError};
use crate::pair::NlStlPair;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub id: String,
    pub nl: String,
    pub reference: String,
    /// Empty when the transform failed.
    pub prediction: String,
    pub fallback_used: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub mode: Mode,
    pub k: usize,
    pub iterations: usize,
    pub pairs: usize,
    pub failed: usize,
    pub fallbacks: usize,
    pub scores: EvalReport,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn table(&self) -> String {
        let refs: Vec<&str> = self.rows.iter().map(|r| r.reference.as_str()).collect();
        let preds: Vec<&str> = self.rows.iter().map(|r| r.prediction.as_str()).collect();
        let e = &self.scores.errors;
        format!(
            "{}mode {}  pairs {}  failed {}  fallbacks {}\nerrors: operator {}  numeric {}  parse {}  template {}\n",
            self.scores.table(&refs, &preds),
            self.mode,
            self.pairs,
            self.failed,
            self.fallbacks,
            e.operator,
            e.numeric,
            e.parse_failure,
            e.template_mismatch
        )
    }
}

/// Transforms each pair's sentence and scores the finals against the pairs'
/// formulas. A failed transform counts as an empty prediction; the run goes
/// on.
pub fn bench(
    test: &[NlStlPair],
    template: &TransformRequest,
    stages: Stages<'_>,
    store: &KnowledgeStore,
    jobs: usize,
) -> Result<BenchReport, MetricError> {
    let reqs: Vec<TransformRequest> = test
        .iter()
        .map(|p| TransformRequest {
            nl: p.nl.clone(),
            ..template.clone()
        })
        .collect();
    let results = transform_batch(&reqs, stages, store, jobs);
    let rows: Vec<BenchRow> = test
        .iter()
        .zip(results)
        .map(|(p, r)| {
            let (prediction, fallback_used, error) = match r {
                Ok(TransformResult {
                    final_stl, fallback_used, ..
                }) => (final_stl, fallback_used, None),
                Err(e) => (String::new(), false, Some(e.to_string())),
            };
            BenchRow {
                id: p.id.clone(),
                nl: p.nl.clone(),
                reference: p.stl.clone(),
                prediction,
                fallback_used,
                error,
            }
        })
        .collect();
    let refs: Vec<&str> = rows.iter().map(|r| r.reference.as_str()).collect();
    let preds: Vec<&str> = rows.iter().map(|r| r.prediction.as_str()).collect();
    let scores = score_corpus(&refs, &preds)?;
    Ok(BenchReport {
        mode: template.mode,
        k: template.k,
        iterations: template.iterations,
        pairs: rows.len(),
        failed: rows.iter().filter(|r| r.error.is_some()).count(),
        fallbacks: rows.iter().filter(|r| r.fallback_used).count(),
        scores,
        rows,
    })
}
