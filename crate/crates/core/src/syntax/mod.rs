//! STL syntax: tokens, AST, parser, canonical printer, templates and rewrites.

mod ast;
mod lexer;
mod parser;
mod printer;
mod rewrite;
mod template;

use serde::{Deserialize, Serialize};

pub use ast::{ArithOp, Atom, CmpOp, Expr, Formula, Interval, IntervalFault};
pub use lexer::{tokenize, LexError, Span, TemporalOp, Token, TokenKind};
pub use parser::{parse, ParseError};
pub use printer::{format, format_expr};
pub use rewrite::{count_operators, desugar, is_core, subformulas};
pub use template::{extract_template, Template, SLOT};

/// A located problem found while checking STL text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    /// 1-based line and column (in characters) of the span start.
    pub fn line_col(&self, source: &str) -> (usize, usize) {
        line_col(source, self.span.start)
    }
}

pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

impl From<&ParseError> for Diagnostic {
    fn from(e: &ParseError) -> Self {
        Diagnostic {
            span: e.span(),
            message: e.to_string(),
        }
    }
}

/// Runs the parser and the interval checks; the diagnostics are the result.
pub fn check_syntax(text: &str) -> Result<(), Vec<Diagnostic>> {
    match parse(text) {
        Ok(_) => Ok(()),
        Err(e) => Err(vec![Diagnostic::from(&e)]),
    }
}

/// Canonical form of STL text, or the parse error.
pub fn canonicalize(text: &str) -> Result<String, ParseError> {
    parse(text).map(|f| format(&f))
}

/// Non-blank, non-comment lines of a formula file with their 1-based numbers.
pub fn formula_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_accepts_nested_obstacle_formula() {
        assert_eq!(check_syntax("F[0,50] G[0,30] (d_obs >= 1.5)"), Ok(()));
    }

    #[test]
    fn check_truncated() {
        let diags = check_syntax("G[0,10] x >").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("expected expression"));
    }

    #[test]
    fn check_singular_interval() {
        let diags = check_syntax("F[3,3](x>0)").unwrap_err();
        assert!(diags[0].message.contains("singular interval"), "{}", diags[0].message);
        assert_eq!(diags[0].span, Span::new(1, 6));
    }

    #[test]
    fn line_col_counts_chars() {
        assert_eq!(line_col("ab\ncφd", 6), (2, 3));
        assert_eq!(line_col("x", 0), (1, 1));
    }

    #[test]
    fn formula_file_lines() {
        let text = "# header\nx > 0\n\n  # indented comment\nG[0,1](y<2)\n";
        let lines: Vec<_> = formula_lines(text).collect();
        assert_eq!(lines, vec![(2, "x > 0"), (5, "G[0,1](y<2)")]);
    }
}
