use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{ArithOp, CmpOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemporalOp {
    Always,
    Eventually,
    Until,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Temporal(TemporalOp),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Cmp(CmpOp),
    Arith(ArithOp),
    AbsBar,
    Ident,
    Number,
    True,
    False,
    /// `φ`, the atom placeholder in rendered templates.
    Placeholder,
}

impl TokenKind {
    /// Connectives, temporal operators, comparisons and arithmetic.
    pub fn is_operator(self) -> bool {
        matches!(
            self,
            TokenKind::Temporal(_)
                | TokenKind::Not
                | TokenKind::And
                | TokenKind::Or
                | TokenKind::Implies
                | TokenKind::Cmp(_)
                | TokenKind::Arith(_)
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Temporal(TemporalOp::Always) => "'G'",
            TokenKind::Temporal(TemporalOp::Eventually) => "'F'",
            TokenKind::Temporal(TemporalOp::Until) => "'U'",
            TokenKind::Not => "'!'",
            TokenKind::And => "'&'",
            TokenKind::Or => "'||'",
            TokenKind::Implies => "'->'",
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
            TokenKind::LBracket => "'['",
            TokenKind::RBracket => "']'",
            TokenKind::Comma => "','",
            TokenKind::Cmp(_) => "comparison operator",
            TokenKind::Arith(_) => "arithmetic operator",
            TokenKind::AbsBar => "'|'",
            TokenKind::Ident => "identifier",
            TokenKind::Number => "number",
            TokenKind::True => "'true'",
            TokenKind::False => "'false'",
            TokenKind::Placeholder => "'φ'",
        };
        f.write_str(s)
    }
}

/// Byte range `[start, end)` into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized character {ch:?} at byte {position}")]
pub struct LexError {
    pub position: usize,
    pub ch: char,
}

fn keyword(word: &str) -> Option<TokenKind> {
    let kind = match word {
        "G" | "always" | "globally" => TokenKind::Temporal(TemporalOp::Always),
        "F" | "eventually" => TokenKind::Temporal(TemporalOp::Eventually),
        "U" | "until" => TokenKind::Temporal(TemporalOp::Until),
        "not" => TokenKind::Not,
        "and" => TokenKind::And,
        "or" => TokenKind::Or,
        "implies" => TokenKind::Implies,
        "true" => TokenKind::True,
        "false" => TokenKind::False,
        _ => return None,
    };
    Some(kind)
}

/// Multi-character symbols, longest first so greedy matching is correct.
const SYMBOLS: &[(&str, TokenKind)] = &[
    ("&&", TokenKind::And),
    ("/\\", TokenKind::And),
    ("||", TokenKind::Or),
    ("\\/", TokenKind::Or),
    ("->", TokenKind::Implies),
    ("=>", TokenKind::Implies),
    ("<=", TokenKind::Cmp(CmpOp::Le)),
    (">=", TokenKind::Cmp(CmpOp::Ge)),
    ("==", TokenKind::Cmp(CmpOp::Eq)),
    ("!=", TokenKind::Cmp(CmpOp::Ne)),
];

fn single_char(c: char) -> Option<TokenKind> {
    let kind = match c {
        '(' => TokenKind::LParen,
        ')' => TokenKind::RParen,
        '[' => TokenKind::LBracket,
        ']' => TokenKind::RBracket,
        ',' => TokenKind::Comma,
        '!' | '¬' | '~' => TokenKind::Not,
        '&' | '∧' => TokenKind::And,
        '∨' => TokenKind::Or,
        '→' | '⇒' => TokenKind::Implies,
        '□' => TokenKind::Temporal(TemporalOp::Always),
        '◊' | '◇' => TokenKind::Temporal(TemporalOp::Eventually),
        '<' => TokenKind::Cmp(CmpOp::Lt),
        '>' => TokenKind::Cmp(CmpOp::Gt),
        '=' => TokenKind::Cmp(CmpOp::Eq),
        '≤' => TokenKind::Cmp(CmpOp::Le),
        '≥' => TokenKind::Cmp(CmpOp::Ge),
        '≠' => TokenKind::Cmp(CmpOp::Ne),
        '+' => TokenKind::Arith(ArithOp::Add),
        '-' | '−' => TokenKind::Arith(ArithOp::Sub),
        '*' | '×' => TokenKind::Arith(ArithOp::Mul),
        '/' => TokenKind::Arith(ArithOp::Div),
        '|' => TokenKind::AbsBar,
        '⊤' => TokenKind::True,
        '⊥' => TokenKind::False,
        'φ' | 'ϕ' => TokenKind::Placeholder,
        _ => return None,
    };
    Some(kind)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits STL text into tokens. Keyword and Unicode aliases are mapped to
/// their canonical kind while the lexeme keeps the original spelling.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;

    'outer: while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().expect("non-empty remainder");

        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }

        if is_ident_start(c) {
            let len = rest
                .char_indices()
                .find(|&(_, ch)| !is_ident_continue(ch))
                .map_or(rest.len(), |(i, _)| i);
            let word = &rest[..len];
            let kind = keyword(word).unwrap_or(TokenKind::Ident);
            tokens.push(Token {
                kind,
                lexeme: word.to_string(),
                span: Span::new(pos, pos + len),
            });
            pos += len;
            continue;
        }

        if c.is_ascii_digit() || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            let len = scan_number(&bytes[pos..]);
            tokens.push(Token {
                kind: TokenKind::Number,
                lexeme: rest[..len].to_string(),
                span: Span::new(pos, pos + len),
            });
            pos += len;
            continue;
        }

        // Biconditional is not part of the grammar.
        if rest.starts_with("<->") {
            return Err(LexError { position: pos, ch: c });
        }

        for &(sym, kind) in SYMBOLS {
            if rest.starts_with(sym) {
                tokens.push(Token {
                    kind,
                    lexeme: sym.to_string(),
                    span: Span::new(pos, pos + sym.len()),
                });
                pos += sym.len();
                continue 'outer;
            }
        }

        match single_char(c) {
            Some(kind) => {
                let len = c.len_utf8();
                tokens.push(Token {
                    kind,
                    lexeme: rest[..len].to_string(),
                    span: Span::new(pos, pos + len),
                });
                pos += len;
            }
            None => return Err(LexError { position: pos, ch: c }),
        }
    }

    Ok(tokens)
}

/// Length of a decimal literal: digits, optional fraction, optional exponent.
fn scan_number(b: &[u8]) -> usize {
    let mut i = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' && i + 1 < b.len() && b[i + 1].is_ascii_digit() {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn spaced_eventually_has_six_tokens() {
        let toks = tokenize("eventually ( a < 5 )").unwrap();
        assert_eq!(toks.len(), 6);
        assert_eq!(toks[0].kind, TokenKind::Temporal(TemporalOp::Eventually));
        assert_eq!(toks[0].lexeme, "eventually");
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  \n\t").unwrap().is_empty());
    }

    #[test]
    fn automatic_transmission_formula_token_count() {
        // G [ 0 , 27 ] ( ( speed > 50 ) -> F [ 1 , 3 ] ( rpm < 3000 ) )
        let toks = tokenize("G[0,27]((speed > 50) -> F[1,3](rpm < 3000))").unwrap();
        let lexemes: Vec<&str> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(
            lexemes,
            [
                "G", "[", "0", ",", "27", "]", "(", "(", "speed", ">", "50", ")", "->", "F",
                "[", "1", ",", "3", "]", "(", "rpm", "<", "3000", ")", ")"
            ]
        );
        assert_eq!(toks.len(), 25);
        assert_eq!(toks.last().unwrap().kind, TokenKind::RParen);
    }

    #[test]
    fn unicode_and_keyword_aliases_normalize() {
        assert_eq!(kinds("a ∧ b"), kinds("a & b"));
        assert_eq!(kinds("a and b"), kinds("a && b"));
        assert_eq!(kinds("a ∨ b"), kinds("a || b"));
        assert_eq!(kinds("a or b"), kinds("a \\/ b"));
        assert_eq!(kinds("¬a"), kinds("!a"));
        assert_eq!(kinds("not a"), kinds("~a"));
        assert_eq!(kinds("a → b"), kinds("a -> b"));
        assert_eq!(kinds("□ a"), kinds("always a"));
        assert_eq!(kinds("globally a"), kinds("G a"));
        assert_eq!(kinds("◊ a"), kinds("F a"));
        assert_eq!(kinds("x ≥ 1"), kinds("x >= 1"));
        assert_eq!(kinds("x ≤ 1"), kinds("x <= 1"));
        assert_eq!(kinds("x − 1"), kinds("x - 1"));
    }

    #[test]
    fn spans_cover_non_whitespace() {
        let text = "G[0, 10] (x_1 ≥ 1.5)";
        let toks = tokenize(text).unwrap();
        let mut covered = String::new();
        let mut last = 0;
        for t in &toks {
            assert!(t.span.start >= last, "overlap at {:?}", t.span);
            assert!(text[last..t.span.start].trim().is_empty());
            assert_eq!(&text[t.span.start..t.span.end], t.lexeme);
            covered.push_str(&t.lexeme);
            last = t.span.end;
        }
        assert!(text[last..].trim().is_empty());
        assert_eq!(covered, text.split_whitespace().collect::<String>());
    }

    #[test]
    fn numbers() {
        let toks = tokenize("1 2.5 .5 3e2 1.5E-3").unwrap();
        let lex: Vec<&str> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lex, ["1", "2.5", ".5", "3e2", "1.5E-3"]);
        assert!(toks.iter().all(|t| t.kind == TokenKind::Number));
        // a dangling exponent marker is not part of the number
        let toks = tokenize("2e").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].kind, TokenKind::Ident);
    }

    #[test]
    fn abs_bars_and_or() {
        assert_eq!(
            kinds("|z| > 1 || y > 0"),
            vec![
                TokenKind::AbsBar,
                TokenKind::Ident,
                TokenKind::AbsBar,
                TokenKind::Cmp(CmpOp::Gt),
                TokenKind::Number,
                TokenKind::Or,
                TokenKind::Ident,
                TokenKind::Cmp(CmpOp::Gt),
                TokenKind::Number,
            ]
        );
    }

    #[test]
    fn unknown_character_is_reported_with_position() {
        let err = tokenize("x > 0 $").unwrap_err();
        assert_eq!(err.position, 6);
        assert_eq!(err.ch, '$');
        let err = tokenize("a <-> b").unwrap_err();
        assert_eq!(err.position, 2);
    }

    #[test]
    fn identifiers_that_start_like_keywords() {
        let toks = tokenize("Gear > 2 & Fx < 1 & until_t > 0").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident);
        assert_eq!(toks[4].kind, TokenKind::Ident);
        assert_eq!(toks[8].kind, TokenKind::Ident);
    }
}
