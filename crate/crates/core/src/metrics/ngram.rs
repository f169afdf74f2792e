use std::collections::HashMap;

use super::MetricError;
use crate::syntax::tokenize;

pub const BLEU_MAX_N: usize = 4;

/// Lexemes from the STL lexer, or whitespace words when the text does not lex.
pub fn metric_tokens(text: &str) -> Vec<String> {
    match tokenize(text) {
        Ok(toks) => toks.into_iter().map(|t| t.lexeme).collect(),
        Err(_) => text.split_whitespace().map(str::to_string).collect(),
    }
}

fn ngram_counts(toks: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for w in toks.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Clipped n-gram statistics accumulated over a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BleuStats {
    pub matches: [usize; BLEU_MAX_N],
    pub totals: [usize; BLEU_MAX_N],
    pub ref_len: usize,
    pub pred_len: usize,
}

impl BleuStats {
    pub fn add(&mut self, reference: &[String], predicted: &[String]) {
        self.ref_len += reference.len();
        self.pred_len += predicted.len();
        for n in 1..=BLEU_MAX_N {
            let r = ngram_counts(reference, n);
            let p = ngram_counts(predicted, n);
            self.totals[n - 1] += predicted.len().saturating_sub(n - 1);
            self.matches[n - 1] += p
                .iter()
                .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
        }
    }

    /// Modified precisions. Orders above 1 with no match are add-one
    /// smoothed; unsmoothed unigram precision keeps disjoint output at 0.
    pub fn precisions(&self) -> [f64; BLEU_MAX_N] {
        let mut p = [0.0; BLEU_MAX_N];
        for n in 0..BLEU_MAX_N {
            let (m, c) = (self.matches[n], self.totals[n]);
            p[n] = if n > 0 && m == 0 {
                1.0 / (c as f64 + 1.0)
            } else if c == 0 {
                0.0
            } else {
                m as f64 / c as f64
            };
        }
        p
    }

    pub fn brevity_penalty(&self) -> f64 {
        if self.pred_len == 0 {
            0.0
        } else if self.pred_len > self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.pred_len as f64).exp()
        }
    }

    pub fn score(&self) -> f64 {
        let p = self.precisions();
        if p.iter().any(|&x| x == 0.0) {
            return 0.0;
        }
        let log_mean = p.iter().map(|x| x.ln()).sum::<f64>() / BLEU_MAX_N as f64;
        self.brevity_penalty() * log_mean.exp()
    }
}

/// Corpus-level BLEU with uniform weights over 1..=4-grams.
pub fn bleu<R: AsRef<str>, P: AsRef<str>>(refs: &[R], preds: &[P]) -> Result<f64, MetricError> {
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
    for (r, p) in refs.iter().zip(preds) {
        stats.add(&metric_tokens(r.as_ref()), &metric_tokens(p.as_ref()));
    }
    Ok(stats.score())
}

fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// ROUGE-L F1 over whitespace-separated words.
pub fn rouge_l(a: &str, b: &str) -> f64 {
    let x: Vec<&str> = a.split_whitespace().collect();
    let y: Vec<&str> = b.split_whitespace().collect();
    match (x.is_empty(), y.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let lcs = lcs_len(&x, &y) as f64;
    if lcs == 0.0 {
        return 0.0;
    }
    let (p, r) = (lcs / y.len() as f64, lcs / x.len() as f64);
    2.0 * p * r / (p + r)
}
