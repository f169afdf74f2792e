use serde::{Deserialize, Serialize};

use crate::metrics::rouge_l;
use crate::pair::NlStlPair;
use crate::syntax::{check_syntax, Diagnostic};

pub const DEFAULT_NOVELTY_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntaxRejection {
    pub pair: NlStlPair,
    pub diagnostics: Vec<Diagnostic>,
}

/// Splits candidates into those whose formula checks and those that do not.
pub fn filter_syntax(cands: Vec<NlStlPair>) -> (Vec<NlStlPair>, Vec<SyntaxRejection>) {
    let mut pass = Vec::new();
    let mut fail = Vec::new();
    for p in cands {
        match check_syntax(&p.stl) {
            Ok(()) => pass.push(p),
            Err(diagnostics) => fail.push(SyntaxRejection { pair: p, diagnostics }),
        }
    }
    (pass, fail)
}

/// Highest ROUGE-L of a candidate sentence against a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoveltyScore {
    pub max_rouge_l: f64,
    pub nearest_id: Option<String>,
}

pub fn novelty_score<'a>(nl: &str, pool: impl IntoIterator<Item = &'a NlStlPair>) -> NoveltyScore {
    let mut best = NoveltyScore {
        max_rouge_l: 0.0,
        nearest_id: None,
    };
    for p in pool {
        let s = rouge_l(nl, &p.nl);
        if best.nearest_id.is_none() || s > best.max_rouge_l {
            best = NoveltyScore {
                max_rouge_l: s,
                nearest_id: Some(p.id.clone()),
            };
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoveltyVerdict {
    pub pair: NlStlPair,
    pub score: NoveltyScore,
}

/// A candidate passes when its sentence scores below `threshold` against
/// every pool sentence. Earlier survivors of the same call join the pool.
pub fn filter_novelty(
    cands: Vec<NlStlPair>,
    pool: &[NlStlPair],
    threshold: f64,
) -> (Vec<NoveltyVerdict>, Vec<NoveltyVerdict>) {
    let mut pass: Vec<NoveltyVerdict> = Vec::new();
    let mut fail = Vec::new();
    for p in cands {
        let score = novelty_score(&p.nl, pool.iter().chain(pass.iter().map(|v| &v.pair)));
        let v = NoveltyVerdict { pair: p, score };
        if v.score.max_rouge_l < threshold {
            pass.push(v);
        } else {
            fail.push(v);
        }
    }
    (pass, fail)
}
