//! Translation scoring: positional token accuracy on formulas and on their
//! templates, corpus BLEU, and ROUGE-L for sentence novelty.

mod alignment;
mod corpus;
mod ngram;

pub use alignment::{align, align_tokens, formula_accuracy, template_accuracy, templates, Alignment, DiffToken, TokenDiff};
pub use corpus::{score_corpus, ErrorBuckets, EvalReport, PairScore};
pub use ngram::{bleu, metric_tokens, rouge_l, BleuStats, BLEU_MAX_N};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("{refs} references but {preds} predictions")]
    LengthMismatch { refs: usize, preds: usize },
    #[error("empty corpus")]
    Empty,
}
