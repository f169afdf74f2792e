use std::collections::{BTreeMap, HashSet};
use std::hash::Hasher;
use std::sync::LazyLock;

use fnv::FnvHasher;
use regex::Regex;

use super::{normalize, EmbedError, Embedder};

pub const DEFAULT_DIM: usize = 1024;

static TOKEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[a-z0-9_]+(?:\.[0-9]+)?|[^\sa-z0-9_]+").expect("valid regex"));

/// Lowercased word and symbol-run tokens.
pub fn words(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    TOKEN.find_iter(&lower).map(|m| m.as_str().to_string()).collect()
}

/// Unigrams followed by space-joined bigrams.
pub fn terms(text: &str) -> Vec<String> {
    let w = words(text);
    let mut out = w.clone();
    out.extend(w.windows(2).map(|p| format!("{} {}", p[0], p[1])));
    out
}

pub fn feature_index(term: &str, dim: usize) -> usize {
    let mut h = FnvHasher::default();
    h.write(term.as_bytes());
    (h.finish() % dim as u64) as usize
}

/// Feature-hashed TF-IDF with smoothed idf `ln((1 + N) / (1 + df)) + 1`.
#[derive(Debug, Clone)]
pub struct HashedTfIdf {
    dim: usize,
    docs: usize,
    df: BTreeMap<String, usize>,
}

impl HashedTfIdf {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            docs: 0,
            df: BTreeMap::new(),
        }
    }

    pub fn fitted<S: AsRef<str>>(dim: usize, corpus: &[S]) -> Self {
        let mut e = Self::new(dim);
        e.refit(corpus.iter().map(AsRef::as_ref));
        e
    }

    fn refit<'a>(&mut self, corpus: impl Iterator<Item = &'a str>) {
        self.df.clear();
        self.docs = 0;
        for doc in corpus {
            self.docs += 1;
            let unique: HashSet<String> = terms(doc).into_iter().collect();
            for t in unique {
                *self.df.entry(t).or_insert(0) += 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn idf(&self, term: &str) -> f64 {
        let df = self.df.get(term).copied().unwrap_or(0) as f64;
        ((1.0 + self.docs as f64) / (1.0 + df)).ln() + 1.0
    }
}

impl Embedder for HashedTfIdf {
    fn fingerprint(&self) -> String {
        let mut h = FnvHasher::default();
        for (t, c) in &self.df {
            h.write(t.as_bytes());
            h.write_usize(*c);
        }
        format!("hashed-tfidf/v1/dim={}/docs={}/df={:016x}", self.dim, self.docs, h.finish())
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        if self.docs == 0 {
            return Err(EmbedError::EmptyCorpus);
        }
        let mut tf: BTreeMap<String, usize> = BTreeMap::new();
        for t in terms(text) {
            *tf.entry(t).or_insert(0) += 1;
        }
        let mut v = vec![0.0; self.dim];
        for (t, c) in &tf {
            v[feature_index(t, self.dim)] += *c as f64 * self.idf(t);
        }
        Ok(normalize(v))
    }

    fn fit(&mut self, corpus: &[String]) {
        self.refit(corpus.iter().map(String::as_str));
    }
}
