use serde::{Deserialize, Serialize};

use super::alignment::{align, templates, TokenDiff};
use super::ngram::{metric_tokens, BleuStats};
use super::MetricError;
use crate::syntax::parse;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub formula_accuracy: f64,
    pub template_accuracy: f64,
    pub token_diff: Vec<TokenDiff>,
    pub parse_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl PairScore {
    pub fn score(reference: &str, predicted: &str) -> Self {
        let mut diagnostic = None;
        let (formula_accuracy, token_diff) = match align(reference, predicted) {
            Ok(a) => (a.score, a.diffs),
            Err(e) => {
                diagnostic = Some(e);
                (0.0, Vec::new())
            }
        };
        let template_accuracy = match templates(reference, predicted) {
            Ok((r, p)) => super::formula_accuracy(&r, &p),
            Err(e) => {
                diagnostic.get_or_insert(e);
                0.0
            }
        };
        PairScore {
            formula_accuracy,
            template_accuracy,
            token_diff,
            parse_ok: parse(predicted).is_ok(),
            diagnostic,
        }
    }
}

/// Per-pair mismatch categories. A pair whose prediction does not parse is
/// counted only as a parse failure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBuckets {
    pub operator: usize,
    pub numeric: usize,
    pub parse_failure: usize,
    pub template_mismatch: usize,
}

impl ErrorBuckets {
    pub fn record(&mut self, s: &PairScore) {
        if !s.parse_ok {
            self.parse_failure += 1;
            return;
        }
        if s.token_diff.iter().any(TokenDiff::involves_operator) {
            self.operator += 1;
        }
        if s
            .token_diff
            .iter()
            .any(|d| d.involves_number() && !d.involves_operator())
        {
            self.numeric += 1;
        }
        if s.template_accuracy < 1.0 {
            self.template_mismatch += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub pairs: Vec<PairScore>,
    pub formula_accuracy: f64,
    pub template_accuracy: f64,
    pub bleu: f64,
    pub errors: ErrorBuckets,
}

impl EvalReport {
    /// Fixed-width table, one row per pair.
    pub fn table(&self, refs: &[impl AsRef<str>], preds: &[impl AsRef<str>]) -> String {
        let mut out = format!("{:>4}  {:>6}  {:>6}  {:<40}  {}\n", "#", "A_F", "A_T", "reference", "prediction");
        for (i, s) in self.pairs.iter().enumerate() {
            out.push_str(&format!(
                "{:>4}  {:>6.4}  {:>6.4}  {:<40}  {}\n",
                i + 1,
                s.formula_accuracy,
                s.template_accuracy,
                refs[i].as_ref(),
                preds[i].as_ref()
            ));
        }
        out.push_str(&format!(
            "mean  {:>6.4}  {:>6.4}  BLEU {:.4}\n",
            self.formula_accuracy, self.template_accuracy, self.bleu
        ));
        out
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

pub fn score_corpus<R: AsRef<str>, P: AsRef<str>>(refs: &[R], preds: &[P]) -> Result<EvalReport, MetricError> {
    if refs.len() != preds.len() {
        return Err(MetricError::LengthMismatch {
            refs: refs.len(),
            preds: preds.len(),
        });
    }
    if refs.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut stats = BleuStats::default();
    let mut errors = ErrorBuckets::default();
    let mut pairs = Vec::with_capacity(refs.len());
    for (r, p) in refs.iter().zip(preds) {
        let (r, p) = (r.as_ref(), p.as_ref());
        stats.add(&metric_tokens(r), &metric_tokens(p));
        let s = PairScore::score(r, p);
        errors.record(&s);
        pairs.push(s);
    }
    Ok(EvalReport {
        formula_accuracy: mean(pairs.iter().map(|s| s.formula_accuracy)),
        template_accuracy: mean(pairs.iter().map(|s| s.template_accuracy)),
        bleu: stats.score(),
        errors,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_corpus_is_perfect() {
        let refs = ["G[0,10](x > 1)", "F[0,3](y <= 2) & z > 0"];
        let r = score_corpus(&refs, &refs).unwrap();
        assert_eq!((r.formula_accuracy, r.template_accuracy), (1.0, 1.0));
        assert!((r.bleu - 1.0).abs() < 1e-12);
        assert_eq!(r.errors, ErrorBuckets::default());
    }

    #[test]
    fn unparseable_predictions() {
        let refs = ["G[0,10](x > 1)", "F[0,3](y <= 2)"];
        let preds = ["@@ nothing", "G[0,10] (x >"];
        let r = score_corpus(&refs, &preds).unwrap();
        assert_eq!(r.template_accuracy, 0.0);
        assert_eq!(r.pairs[0].formula_accuracy, 0.0);
        assert!(r.pairs.iter().all(|p| p.diagnostic.is_some()));
        assert_eq!(r.errors.parse_failure, 2);
        assert_eq!(r.errors.operator + r.errors.numeric + r.errors.template_mismatch, 0);
    }

    #[test]
    fn single_swap_corpus() {
        let r = score_corpus(&["eventually ( a < 5 )"], &["eventually ( b < 5 )"]).unwrap();
        assert_eq!(r.formula_accuracy, 5.0 / 6.0);
        assert_eq!(r.template_accuracy, 1.0);
        assert_eq!(r.errors, ErrorBuckets::default());
    }

    #[test]
    fn buckets() {
        let refs = ["G[0,10](x > 1)", "G[0,10](x > 1)", "G[0,10](x > 1)"];
        let preds = ["F[0,10](x > 1)", "G[0,12](x > 1)", "G[0,10](x >= 2)"];
        let r = score_corpus(&refs, &preds).unwrap();
        assert_eq!(
            r.errors,
            ErrorBuckets {
                operator: 2,
                numeric: 2,
                parse_failure: 0,
                template_mismatch: 1
            }
        );
    }

    #[test]
    fn mismatched_lengths() {
        assert!(matches!(
            score_corpus(&["x > 0"], &["x > 0", "y > 0"]),
            Err(MetricError::LengthMismatch { .. })
        ));
    }
}
