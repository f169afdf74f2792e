use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{dot, EmbedError, Embedder, HashedTfIdf, DEFAULT_DIM};
use crate::pair::{read_jsonl, write_jsonl, NlStlPair};

const MAGIC: &[u8; 8] = b"NLSTLVEC";
const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("knowledge store is empty")]
    EmptyStore,
    #[error("duplicate pair id '{0}'")]
    DuplicateId(String),
    #[error("vector file: {0}")]
    BadSidecar(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("pair file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Which text of a pair is embedded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedField {
    /// Sentence and canonical formula, separated by a newline.
    #[default]
    Pair,
    NlOnly,
}

impl EmbedField {
    pub fn text(self, p: &NlStlPair) -> String {
        match self {
            EmbedField::Pair => p.embedding_text(),
            EmbedField::NlOnly => p.nl.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hit {
    pub pair: NlStlPair,
    pub score: f64,
}

/// Pairs with aligned embedding vectors.
pub struct KnowledgeStore {
    pairs: Vec<NlStlPair>,
    vectors: Vec<Vec<f64>>,
    embedder: Box<dyn Embedder>,
    field: EmbedField,
}

impl std::fmt::Debug for KnowledgeStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KnowledgeStore")
            .field("pairs", &self.pairs.len())
            .field("provider", &self.embedder.fingerprint())
            .field("field", &self.field)
            .finish()
    }
}

impl KnowledgeStore {
    pub fn new(embedder: Box<dyn Embedder>, field: EmbedField) -> Self {
        Self {
            pairs: Vec::new(),
            vectors: Vec::new(),
            embedder,
            field,
        }
    }

    /// Store over the default hashed TF-IDF provider.
    pub fn with_pairs(pairs: Vec<NlStlPair>) -> Result<Self, StoreError> {
        let mut s = Self::new(Box::new(HashedTfIdf::new(DEFAULT_DIM)), EmbedField::Pair);
        s.add(pairs)?;
        Ok(s)
    }

    pub fn pairs(&self) -> &[NlStlPair] {
        &self.pairs
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn field(&self) -> EmbedField {
        self.field
    }

    pub fn fingerprint(&self) -> String {
        self.embedder.fingerprint()
    }

    pub fn get(&self, id: &str) -> Option<&NlStlPair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    /// Adds pairs, refits the provider on the enlarged corpus and re-embeds.
    pub fn add(&mut self, pairs: Vec<NlStlPair>) -> Result<(), StoreError> {
        let mut ids: HashSet<&str> = self.pairs.iter().map(|p| p.id.as_str()).collect();
        for p in &pairs {
            if !ids.insert(&p.id) {
                return Err(StoreError::DuplicateId(p.id.clone()));
            }
        }
        let mut all = self.pairs.clone();
        all.extend(pairs);
        let texts = self.texts(&all);
        let mut vectors = Vec::with_capacity(all.len());
        self.embedder.fit(&texts);
        for t in &texts {
            vectors.push(self.embedder.embed(t)?);
        }
        self.pairs = all;
        self.vectors = vectors;
        Ok(())
    }

    fn texts(&self, pairs: &[NlStlPair]) -> Vec<String> {
        pairs.iter().map(|p| self.field.text(p)).collect()
    }

    pub fn embed_pair(&self, p: &NlStlPair) -> Result<Vec<f64>, EmbedError> {
        self.embedder.embed(&self.field.text(p))
    }

    pub fn embed_query(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        self.embedder.embed(text)
    }

    /// The `k` most similar pairs by cosine, ties by ascending id.
    pub fn top_k(&self, query: &str, k: usize) -> Result<Vec<Hit>, StoreError> {
        if self.is_empty() {
            return Err(StoreError::EmptyStore);
        }
        let q = self.embed_query(query)?;
        let mut scored: Vec<(f64, usize)> = self.vectors.iter().map(|v| dot(&q, v)).zip(0..).collect();
        scored.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then_with(|| self.pairs[a.1].id.cmp(&self.pairs[b.1].id))
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(score, i)| Hit {
                pair: self.pairs[i].clone(),
                score,
            })
            .collect())
    }

    /// Writes the pairs as JSON Lines and the vectors to a binary sidecar
    /// headed by the provider fingerprint.
    pub fn save(&self, pairs_path: &Path, vectors_path: &Path) -> Result<(), StoreError> {
        crate::fsutil::write_atomic(pairs_path, write_jsonl(&self.pairs).as_bytes())?;
        let fp = self.fingerprint();
        let dim = self.vectors.first().map_or(0, Vec::len);
        let mut buf = Vec::with_capacity(32 + fp.len() + self.vectors.len() * dim * 8);
        buf.write_all(MAGIC)?;
        buf.write_all(&VERSION.to_le_bytes())?;
        buf.write_all(&(fp.len() as u32).to_le_bytes())?;
        buf.write_all(fp.as_bytes())?;
        buf.write_all(&(self.vectors.len() as u64).to_le_bytes())?;
        buf.write_all(&(dim as u64).to_le_bytes())?;
        for v in &self.vectors {
            for x in v {
                buf.write_all(&x.to_le_bytes())?;
            }
        }
        crate::fsutil::write_atomic(vectors_path, &buf)?;
        Ok(())
    }

    /// Loads a saved store. Vectors are recomputed when the sidecar is
    /// missing, unreadable or written by a different provider state; the
    /// flag reports whether that happened.
    pub fn load(
        pairs_path: &Path,
        vectors_path: &Path,
        mut embedder: Box<dyn Embedder>,
        field: EmbedField,
    ) -> Result<(Self, bool), StoreError> {
        let pairs = read_jsonl(&std::fs::read_to_string(pairs_path)?)?;
        let texts: Vec<String> = pairs.iter().map(|p| field.text(p)).collect();
        embedder.fit(&texts);
        let mut store = Self::new(embedder, field);
        let cached = std::fs::read(vectors_path)
            .ok()
            .and_then(|bytes| read_sidecar(&bytes).ok())
            .filter(|(fp, vecs)| *fp == store.fingerprint() && vecs.len() == pairs.len());
        match cached {
            Some((_, vectors)) => {
                store.pairs = pairs;
                store.vectors = vectors;
                Ok((store, false))
            }
            None => {
                store.add(pairs)?;
                Ok((store, true))
            }
        }
    }
}

fn read_sidecar(bytes: &[u8]) -> Result<(String, Vec<Vec<f64>>), StoreError> {
    let bad = |m: &str| StoreError::BadSidecar(m.to_string());
    let mut r = bytes;
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    if u32::from_le_bytes(u32buf) != VERSION {
        return Err(bad("unsupported version"));
    }
    r.read_exact(&mut u32buf)?;
    let mut fp = vec![0u8; u32::from_le_bytes(u32buf) as usize];
    r.read_exact(&mut fp)?;
    let fp = String::from_utf8(fp).map_err(|_| bad("fingerprint is not UTF-8"))?;
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let dim = u64::from_le_bytes(u64buf) as usize;
    if r.len() != count * dim * 8 {
        return Err(bad("truncated vector data"));
    }
    let vectors = r
        .chunks_exact(dim.max(1) * 8)
        .take(count)
        .map(|row| {
            row.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect()
        })
        .collect();
    Ok((fp, vectors))
}
