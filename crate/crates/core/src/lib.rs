//! Toolkit for translating natural language into signal temporal logic.
//!
//! The crate bundles an STL parser and canonical printer, an offline Boolean
//! monitor over sampled traces, the token-alignment and n-gram metrics used to
//! score translations, and the two LLM-driven pipelines: cluster-guided
//! dataset augmentation with rule-based filters and a review gate, and
//! generate-then-refine translation grounded in retrieved reference pairs.

pub mod dataset;
pub mod embed;
pub mod fixtures;
pub mod kgst;
mod fsutil;
pub mod llm;
pub mod metrics;
pub mod pair;
pub mod prompts;
pub mod semantics;
pub mod stats;
pub mod syntax;
