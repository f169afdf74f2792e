//! Text embeddings, the searchable pair store and k-means exemplar selection.

mod http;
mod kmeans;
mod store;
mod tfidf;

pub use http::HttpEmbedder;
pub use kmeans::{kmeans, kmeans_points, ClusterError, Clustering, MAX_ITERATIONS};
pub use store::{EmbedField, Hit, KnowledgeStore, StoreError};
pub use tfidf::{feature_index, terms, words, HashedTfIdf, DEFAULT_DIM};

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("embedding provider has not been fitted on a corpus")]
    EmptyCorpus,
    #[error("embedding provider failed: {0}")]
    Provider(String),
}

/// Maps text to a fixed-dimension, L2-normalized vector.
pub trait Embedder: Send + Sync {
    /// Identifies the provider and its fitted state; stored vectors are only
    /// reused when fingerprints match.
    fn fingerprint(&self) -> String;

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError>;

    /// Re-estimates corpus statistics. Static providers ignore it.
    fn fit(&mut self, _corpus: &[String]) {}
}

pub fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (dot(a, a).sqrt(), dot(b, b).sqrt());
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
