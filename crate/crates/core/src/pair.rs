//! The NL-STL pair record shared by the store, the dataset and the pipelines.

use serde::{Deserialize, Serialize};

use crate::syntax::{format, parse, Formula, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Handcrafted,
    Generated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Seed,
    Candidate,
    Accepted,
    Rejected,
}

impl Status {
    /// Seeds and accepted pairs make up the exemplar and novelty pool.
    pub fn in_pool(self) -> bool {
        matches!(self, Status::Seed | Status::Accepted)
    }
}

/// A sentence with its formula. `stl` holds the canonical rendering when the
/// text parses and the raw text otherwise; `formula` is derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "PairRecord", into = "PairRecord")]
pub struct NlStlPair {
    pub id: String,
    pub nl: String,
    pub stl: String,
    pub formula: Option<Formula>,
    pub domain: String,
    pub source: Source,
    pub round: u32,
    pub status: Status,
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    id: String,
    nl: String,
    stl: String,
    #[serde(default = "default_domain")]
    domain: String,
    #[serde(default = "default_source")]
    source: Source,
    #[serde(default)]
    round: u32,
    #[serde(default = "default_status")]
    status: Status,
}

fn default_domain() -> String {
    "other".into()
}

fn default_source() -> Source {
    Source::Handcrafted
}

fn default_status() -> Status {
    Status::Seed
}

impl From<PairRecord> for NlStlPair {
    fn from(r: PairRecord) -> Self {
        let mut p = NlStlPair {
            id: r.id,
            nl: r.nl,
            stl: r.stl,
            formula: None,
            domain: r.domain,
            source: r.source,
            round: r.round,
            status: r.status,
        };
        p.reparse();
        p
    }
}

impl From<NlStlPair> for PairRecord {
    fn from(p: NlStlPair) -> Self {
        PairRecord {
            id: p.id,
            nl: p.nl,
            stl: p.stl,
            domain: p.domain,
            source: p.source,
            round: p.round,
            status: p.status,
        }
    }
}

impl NlStlPair {
    /// Builds a pair from raw text; unparseable STL is kept verbatim.
    pub fn new(id: impl Into<String>, nl: impl Into<String>, stl: impl Into<String>) -> Self {
        let mut p = NlStlPair {
            id: id.into(),
            nl: nl.into().trim().to_string(),
            stl: stl.into().trim().to_string(),
            formula: None,
            domain: default_domain(),
            source: Source::Handcrafted,
            round: 0,
            status: Status::Seed,
        };
        p.reparse();
        p
    }

    /// Like [`NlStlPair::new`] but requires the formula to parse.
    pub fn parsed(id: impl Into<String>, nl: impl Into<String>, stl: &str) -> Result<Self, ParseError> {
        parse(stl)?;
        Ok(Self::new(id, nl, stl))
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Self {
        self.domain = domain.into();
        self
    }

    pub fn with_origin(mut self, source: Source, round: u32, status: Status) -> Self {
        self.source = source;
        self.round = round;
        self.status = status;
        self
    }

    /// Re-derives `formula` and canonicalizes `stl` when it parses.
    pub fn reparse(&mut self) {
        match parse(&self.stl) {
            Ok(f) => {
                self.stl = format(&f);
                self.formula = Some(f);
            }
            Err(_) => self.formula = None,
        }
    }

    pub fn parse_error(&self) -> Option<ParseError> {
        parse(&self.stl).err()
    }

    /// Text embedded for retrieval and clustering.
    pub fn embedding_text(&self) -> String {
        format!("{}\n{}", self.nl, self.stl)
    }
}

/// Reads JSON Lines of pairs, skipping blank lines.
pub fn read_jsonl(text: &str) -> Result<Vec<NlStlPair>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

pub fn write_jsonl(pairs: &[NlStlPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&serde_json::to_string(p).expect("pair serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_on_construction() {
        let p = NlStlPair::new("a", " Speed stays low. ", "G[0,5](speed<3)");
        assert_eq!(p.stl, "G[0,5] ( speed < 3 )");
        assert_eq!(p.nl, "Speed stays low.");
        assert!(p.formula.is_some());
        let bad = NlStlPair::new("b", "x", "G[0,5] x >");
        assert_eq!(bad.stl, "G[0,5] x >");
        assert!(bad.formula.is_none() && bad.parse_error().is_some());
    }

    #[test]
    fn jsonl_roundtrip_rederives_formula() {
        let p = NlStlPair::new("s1", "Always positive.", "G[0,1](x>0)")
            .with_domain("robotics")
            .with_origin(Source::Generated, 2, Status::Accepted);
        let text = write_jsonl(&[p.clone()]);
        assert!(!text.contains("formula"));
        assert!(text.contains("\"status\":\"accepted\""));
        assert_eq!(read_jsonl(&text).unwrap(), vec![p]);
    }

    #[test]
    fn missing_optional_fields_default() {
        let p: NlStlPair = serde_json::from_str(r#"{"id":"q","nl":"n","stl":"x>0"}"#).unwrap();
        assert_eq!((p.status, p.source, p.round), (Status::Seed, Source::Handcrafted, 0));
        assert_eq!(p.domain, "other");
    }
}
