//! Corpus statistics: formula shape, sentence vocabulary, n-gram diversity
//! and identifier/constant usage.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::pair::NlStlPair;
use crate::syntax::{count_operators, format, subformulas, tokenize, Formula, TokenKind};

pub const DEFAULT_NGRAM_MAX: usize = 3;

/// Quantities whose definition is this toolkit's own choice.
pub const TOOLKIT_DEFINED: [&str; 2] = ["subformulas_per_formula", "ngram_diversity"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("pair '{0}' does not parse")]
    ParseFailure(String),
    #[error("no pairs")]
    Empty,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub avg: f64,
    pub median: f64,
}

impl Summary {
    /// Mean and median; the median of an even count is the midpoint of the
    /// two central values. All zero for no values.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
        Self {
            avg: v.iter().sum::<f64>() / n as f64,
            median,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaStats {
    pub subformulas_per_formula: Summary,
    pub operators_per_formula: Summary,
    pub stl_ngram_diversity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextStats {
    pub unique_sentences: usize,
    pub unique_words: usize,
    pub words_per_sentence: Summary,
    pub nl_ngram_diversity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifierStats {
    pub chars_per_identifier: Summary,
    pub digits_per_constant: Summary,
    pub identifiers_per_formula: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub pairs: usize,
    pub formula: FormulaStats,
    pub text: TextStats,
    pub identifiers: IdentifierStats,
    pub toolkit_defined: Vec<String>,
}

/// Lowercased words with leading and trailing punctuation removed.
pub fn sentence_words(nl: &str) -> Vec<String> {
    nl.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn entropy_bits<T: Ord>(counts: &BTreeMap<T, usize>) -> f64 {
    let total: usize = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    -counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Mean over n = 1..=n_max of the Shannon entropy (bits) of the corpus
/// n-gram distribution, divided by n. N-grams do not cross sequences.
pub fn ngram_diversity<S: AsRef<str>>(seqs: &[Vec<S>], n_max: usize) -> f64 {
    assert!(n_max >= 1, "n_max must be positive");
    let mut total = 0.0;
    for n in 1..=n_max {
        let mut counts: BTreeMap<Vec<&str>, usize> = BTreeMap::new();
        for s in seqs {
            let words: Vec<&str> = s.iter().map(AsRef::as_ref).collect();
            for g in words.windows(n) {
                *counts.entry(g.to_vec()).or_default() += 1;
            }
        }
        // -0.0 from an all-certain distribution prints badly.
        total += entropy_bits(&counts).max(0.0) / n as f64;
    }
    total / n_max as f64
}

struct PerFormula {
    subformulas: f64,
    operators: f64,
    tokens: Vec<String>,
    identifier_lengths: Vec<f64>,
    constant_digits: Vec<f64>,
}

fn per_formula(f: &Formula) -> PerFormula {
    let tokens = tokenize(&format(f)).expect("canonical text lexes");
    let mut identifier_lengths = Vec::new();
    let mut constant_digits = Vec::new();
    for t in &tokens {
        match t.kind {
            TokenKind::Ident => identifier_lengths.push(t.lexeme.chars().count() as f64),
            TokenKind::Number => constant_digits.push(t.lexeme.chars().filter(char::is_ascii_digit).count() as f64),
            _ => {}
        }
    }
    PerFormula {
        subformulas: subformulas(f).len() as f64,
        operators: count_operators(f) as f64,
        tokens: tokens.into_iter().map(|t| t.lexeme).collect(),
        identifier_lengths,
        constant_digits,
    }
}

pub fn compute_stats(pairs: &[NlStlPair]) -> Result<CorpusStats, StatsError> {
    compute_stats_with(pairs, DEFAULT_NGRAM_MAX)
}

pub fn compute_stats_with(pairs: &[NlStlPair], n_max: usize) -> Result<CorpusStats, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut forms = Vec::with_capacity(pairs.len());
    for p in pairs {
        let f = p.formula.as_ref().ok_or_else(|| StatsError::ParseFailure(p.id.clone()))?;
        forms.push(per_formula(f));
    }
    let words: Vec<Vec<String>> = pairs.iter().map(|p| sentence_words(&p.nl)).collect();

    let collect = |get: fn(&PerFormula) -> &Vec<f64>| -> Vec<f64> { forms.iter().flat_map(|f| get(f).iter().copied()).collect() };
    let identifier_lengths = collect(|f| &f.identifier_lengths);
    let constant_digits = collect(|f| &f.constant_digits);
    let stl_tokens: Vec<Vec<String>> = forms.iter().map(|f| f.tokens.clone()).collect();

    Ok(CorpusStats {
        pairs: pairs.len(),
        formula: FormulaStats {
            subformulas_per_formula: Summary::of(&forms.iter().map(|f| f.subformulas).collect::<Vec<_>>()),
            operators_per_formula: Summary::of(&forms.iter().map(|f| f.operators).collect::<Vec<_>>()),
            stl_ngram_diversity: ngram_diversity(&stl_tokens, n_max),
        },
        text: TextStats {
            unique_sentences: pairs.iter().map(|p| p.nl.trim()).collect::<BTreeSet<_>>().len(),
            unique_words: words.iter().flatten().collect::<BTreeSet<_>>().len(),
            words_per_sentence: Summary::of(&words.iter().map(|w| w.len() as f64).collect::<Vec<_>>()),
            nl_ngram_diversity: ngram_diversity(&words, n_max),
        },
        identifiers: IdentifierStats {
            chars_per_identifier: Summary::of(&identifier_lengths),
            digits_per_constant: Summary::of(&constant_digits),
            identifiers_per_formula: identifier_lengths.len() as f64 / pairs.len() as f64,
        },
        toolkit_defined: TOOLKIT_DEFINED.iter().map(|s| s.to_string()).collect(),
    })
}

impl CorpusStats {
    /// Three blocks: formula structure, sentence text, identifiers.
    pub fn table(&self) -> String {
        let s = |x: &Summary| format!("{:.2} / {:.2}", x.avg, x.median);
        let f = &self.formula;
        let t = &self.text;
        let i = &self.identifiers;
        let rows = [
            ("(a) formulas", String::new()),
            ("  subformulas per formula (avg / median)*", s(&f.subformulas_per_formula)),
            ("  operators per formula (avg / median)", s(&f.operators_per_formula)),
            ("  STL n-gram diversity*", format!("{:.4}", f.stl_ngram_diversity)),
            ("(b) sentences", String::new()),
            ("  unique sentences", t.unique_sentences.to_string()),
            ("  unique words", t.unique_words.to_string()),
            ("  words per sentence (avg / median)", s(&t.words_per_sentence)),
            ("  NL n-gram diversity*", format!("{:.4}", t.nl_ngram_diversity)),
            ("(c) identifiers", String::new()),
            ("  chars per identifier (avg / median)", s(&i.chars_per_identifier)),
            ("  digits per constant (avg / median)", s(&i.digits_per_constant)),
            ("  identifiers per formula (avg)", format!("{:.2}", i.identifiers_per_formula)),
        ];
        let mut out = format!("pairs: {}\n", self.pairs);
        for (k, v) in rows {
            out.push_str(format!("{k:<44} {v}").trim_end());
            out.push('\n');
        }
        out.push_str("* definition chosen by this toolkit\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AT: &str = "G[0,27](speed > 50 -> F[1,3](rpm < 3000))";

    fn one(stl: &str) -> CorpusStats {
        compute_stats(&[NlStlPair::new("a", "A sentence.", stl)]).unwrap()
    }

    #[test]
    fn single_atom() {
        let s = one("x > 0");
        assert_eq!(s.formula.subformulas_per_formula.avg, 1.0);
        assert_eq!(s.formula.operators_per_formula.avg, 0.0);
        assert_eq!(s.identifiers.identifiers_per_formula, 1.0);
    }

    #[test]
    fn response_formula() {
        let s = one(AT);
        assert_eq!(s.formula.operators_per_formula.avg, 3.0);
        assert_eq!(s.formula.subformulas_per_formula.avg, 5.0);
        assert_eq!(s.identifiers.identifiers_per_formula, 2.0);
        assert!((s.identifiers.digits_per_constant.avg - 11.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.identifiers.digits_per_constant.median, 1.5);
        assert_eq!(s.identifiers.chars_per_identifier.avg, 4.0);
    }

    #[test]
    fn unique_counts_ignore_duplicates() {
        let a = NlStlPair::new("a", "Speed stays low.", "x > 0");
        let b = NlStlPair::new("b", "Speed stays low.", "y > 0");
        let c = NlStlPair::new("c", "speed, STAYS high", "z > 0");
        let s = compute_stats(&[a.clone(), b, c]).unwrap();
        assert_eq!(s.text.unique_sentences, 2);
        assert_eq!(s.text.unique_words, 4);
        let s2 = compute_stats(&[a.clone(), a]).unwrap();
        assert_eq!(s2.text.unique_sentences, 1);
    }

    #[test]
    fn parse_failure_names_the_pair() {
        let bad = NlStlPair::new("bad", "x", "G[2,1](x>0)");
        assert_eq!(compute_stats(&[bad]), Err(StatsError::ParseFailure("bad".into())));
        assert_eq!(compute_stats(&[]), Err(StatsError::Empty));
    }

    #[test]
    fn diversity_goldens() {
        assert_eq!(ngram_diversity(&[vec!["a", "a", "a"]], 3), 0.0);
        assert_eq!(ngram_diversity(&[vec!["a", "b"]], 1), 1.0);
        // Unigrams a:2 b:1 c:1 give 1.5 bits; bigrams aa, ab, bc give
        // log2(3) bits, halved.
        let d = ngram_diversity(&[vec!["a", "a", "b", "c"]], 2);
        assert!((d - (1.5 + 3f64.log2() / 2.0) / 2.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn ngrams_stay_inside_sequences() {
        // Two one-token sequences have no bigrams at all.
        let d = ngram_diversity(&[vec!["a"], vec!["b"]], 2);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn summary_median() {
        assert_eq!(Summary::of(&[3.0, 1.0, 2.0]).median, 2.0);
        assert_eq!(Summary::of(&[4.0, 1.0, 2.0, 3.0]).median, 2.5);
        assert_eq!(Summary::of(&[]), Summary::default());
    }

    #[test]
    fn table_marks_toolkit_quantities() {
        let t = one(AT).table();
        let row = t.lines().find(|l| l.contains("operators per formula")).unwrap();
        assert!(row.ends_with(" 3.00 / 3.00"), "{t}");
        assert!(t.contains("* definition chosen by this toolkit"));
    }
}
