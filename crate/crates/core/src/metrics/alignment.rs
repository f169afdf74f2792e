use serde::{Deserialize, Serialize};

use crate::syntax::{extract_template, parse, tokenize, Span, Token, TokenKind};

/// One aligned position where reference and prediction disagree. A missing
/// side means that sequence is shorter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDiff {
    pub position: usize,
    pub reference: Option<DiffToken>,
    pub predicted: Option<DiffToken>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffToken {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl From<&Token> for DiffToken {
    fn from(t: &Token) -> Self {
        Self {
            kind: t.kind,
            lexeme: t.lexeme.clone(),
            span: t.span,
        }
    }
}

impl TokenDiff {
    pub fn involves_operator(&self) -> bool {
        self.kinds().any(TokenKind::is_operator)
    }

    pub fn involves_number(&self) -> bool {
        self.kinds().any(|k| k == TokenKind::Number)
    }

    fn kinds(&self) -> impl Iterator<Item = TokenKind> + '_ {
        self.reference.iter().chain(&self.predicted).map(|t| t.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub score: f64,
    pub matches: usize,
    pub len_ref: usize,
    pub len_pred: usize,
    pub diffs: Vec<TokenDiff>,
}

fn same(a: &Token, b: &Token) -> bool {
    a.kind == b.kind && a.lexeme == b.lexeme
}

pub fn align_tokens(r: &[Token], p: &[Token]) -> Alignment {
    let n = r.len().max(p.len());
    let mut matches = 0;
    let mut diffs = Vec::new();
    for i in 0..n {
        match (r.get(i), p.get(i)) {
            (Some(a), Some(b)) if same(a, b) => matches += 1,
            (a, b) => diffs.push(TokenDiff {
                position: i,
                reference: a.map(DiffToken::from),
                predicted: b.map(DiffToken::from),
            }),
        }
    }
    Alignment {
        score: if n == 0 { 1.0 } else { matches as f64 / n as f64 },
        matches,
        len_ref: r.len(),
        len_pred: p.len(),
        diffs,
    }
}

/// Tokenizes both sides and aligns them; the error names the side that
/// failed to lex.
pub fn align(reference: &str, predicted: &str) -> Result<Alignment, String> {
    let r = tokenize(reference).map_err(|e| format!("reference: {e}"))?;
    let p = tokenize(predicted).map_err(|e| format!("prediction: {e}"))?;
    Ok(align_tokens(&r, &p))
}

/// Positional token match rate, `matches / max(|r|, |p|)`. Inputs that fail
/// to lex score 0.
pub fn formula_accuracy(reference: &str, predicted: &str) -> f64 {
    align(reference, predicted).map_or(0.0, |a| a.score)
}

/// Template strings of both sides, or the parse error message.
pub fn templates(reference: &str, predicted: &str) -> Result<(String, String), String> {
    let r = parse(reference).map_err(|e| format!("reference: {e}"))?;
    let p = parse(predicted).map_err(|e| format!("prediction: {e}"))?;
    Ok((extract_template(&r).to_string(), extract_template(&p).to_string()))
}

/// Formula accuracy of the two templates. Unparseable inputs score 0.
pub fn template_accuracy(reference: &str, predicted: &str) -> f64 {
    templates(reference, predicted).map_or(0.0, |(r, p)| formula_accuracy(&r, &p))
}
