//! Recursive-descent parser for the STL surface grammar.
//!
//! ```text
//! formula  := implies
//! implies  := or ( '->' implies )?
//! or       := and ( '||' and )*
//! and      := until ( '&' until )*
//! until    := unary ( 'U' window until )?
//! unary    := '!' unary | ('G' | 'F') window unary | primary
//! primary  := 'true' | 'false' | atom | '(' formula ')'
//! atom     := expr cmp expr
//! expr     := term ( ('+' | '-') term )*
//! term     := factor ( ('*' | '/') factor )*
//! factor   := '-' factor | NUMBER | IDENT ( '[' 't' ']' )?
//!           | 'abs' '(' expr ')' | '(' expr ')' | '|' expr '|'
//! window   := ( '[' NUMBER ',' NUMBER ']' )?
//! ```
//!
//! A parenthesis at formula level may open either a sub-formula or an
//! arithmetic term, so `primary` tries the atom reading first and rewinds.

use std::collections::BTreeSet;

use super::ast::{ArithOp, Atom, Expr, Formula, Interval, IntervalFault};
use super::lexer::{tokenize, LexError, Span, TemporalOp, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{}", syntax_message(.expected, .found))]
    Syntax {
        position: usize,
        span: Span,
        expected: Vec<String>,
        found: Option<String>,
    },
    #[error("{fault} [{lo}, {hi}]")]
    Interval {
        span: Span,
        fault: IntervalFault,
        lo: f64,
        hi: f64,
    },
}

fn syntax_message(expected: &[String], found: &Option<String>) -> String {
    let want = match expected {
        [] => "valid input".to_string(),
        [one] => one.clone(),
        many => format!("one of {}", many.join(", ")),
    };
    match found {
        Some(tok) => format!("expected {want}, found {tok}"),
        None => format!("expected {want}, found end of input"),
    }
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lex(e) => Span::new(e.position, e.position + e.ch.len_utf8()),
            ParseError::Syntax { span, .. } | ParseError::Interval { span, .. } => *span,
        }
    }
}

/// Parses STL text into a [`Formula`].
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text.len());
    let result = p.formula();
    match result {
        Ok(f) if p.at_end() => Ok(f),
        Ok(_) => {
            p.expect_label("end of input");
            Err(p.syntax_error())
        }
        Err(Abort::Backtrack) => Err(p.syntax_error()),
        Err(Abort::Fatal(e)) => Err(e),
    }
}

enum Abort {
    Backtrack,
    Fatal(ParseError),
}

type PResult<T> = Result<T, Abort>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    src_len: usize,
    furthest: usize,
    expected: BTreeSet<String>,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], src_len: usize) -> Self {
        Self {
            toks,
            pos: 0,
            src_len,
            furthest: 0,
            expected: BTreeSet::new(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.toks[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_label(&mut self, label: &str) {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
        }
        if self.pos == self.furthest {
            self.expected.insert(label.to_string());
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if self.peek_kind() == Some(kind) {
            Ok(self.bump())
        } else {
            self.expect_label(&kind.to_string());
            Err(Abort::Backtrack)
        }
    }

    fn span_at(&self, idx: usize) -> Span {
        match self.toks.get(idx) {
            Some(t) => t.span,
            None => Span::new(self.src_len, self.src_len),
        }
    }

    fn syntax_error(&self) -> ParseError {
        let span = self.span_at(self.furthest);
        ParseError::Syntax {
            position: span.start,
            span,
            expected: self.expected.iter().cloned().collect(),
            found: self.toks.get(self.furthest).map(|t| format!("'{}'", t.lexeme)),
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.implies()
    }

    fn implies(&mut self) -> PResult<Formula> {
        let lhs = self.or()?;
        if self.eat(TokenKind::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut lhs = self.and()?;
        while self.eat(TokenKind::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut lhs = self.until()?;
        while self.eat(TokenKind::And) {
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> PResult<Formula> {
        let lhs = self.unary()?;
        if self.eat(TokenKind::Temporal(TemporalOp::Until)) {
            let interval = self.window()?;
            let rhs = self.until()?;
            return Ok(Formula::until(interval, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek_kind() {
            Some(TokenKind::Not) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(TokenKind::Temporal(TemporalOp::Always)) => {
                self.bump();
                let i = self.window()?;
                Ok(Formula::always(i, self.unary()?))
            }
            Some(TokenKind::Temporal(TemporalOp::Eventually)) => {
                self.bump();
                let i = self.window()?;
                Ok(Formula::eventually(i, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        let start = self.pos;
        match self.peek_kind() {
            Some(TokenKind::True) => {
                self.bump();
                return Ok(Formula::True);
            }
            Some(TokenKind::False) => {
                self.bump();
                return Ok(Formula::False);
            }
            _ => {}
        }

        match self.atom() {
            Ok(a) => return Ok(Formula::Atomic(a)),
            Err(Abort::Fatal(e)) => return Err(Abort::Fatal(e)),
            Err(Abort::Backtrack) => self.pos = start,
        }

        if self.eat(TokenKind::LParen) {
            let inner = self.formula()?;
            self.expect(TokenKind::RParen)?;
            return Ok(inner);
        }

        if self.furthest == start {
            self.expected.clear();
            self.expected.insert("formula".to_string());
        }
        Err(Abort::Backtrack)
    }

    fn atom(&mut self) -> PResult<Atom> {
        let lhs = self.expr()?;
        let cmp = match self.peek_kind() {
            Some(TokenKind::Cmp(op)) => {
                self.bump();
                op
            }
            _ => {
                self.expect_label("comparison operator");
                return Err(Abort::Backtrack);
            }
        };
        let rhs = self.expr()?;
        Ok(Atom::new(lhs, cmp, rhs))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Arith(op @ (ArithOp::Add | ArithOp::Sub))) => op,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Arith(op @ (ArithOp::Mul | ArithOp::Div))) => op,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            self.expect_label("expression");
            return Err(Abort::Backtrack);
        };
        match tok.kind {
            TokenKind::Arith(ArithOp::Sub) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            TokenKind::Number => {
                let value = self.number()?;
                Ok(Expr::Const(value))
            }
            TokenKind::Ident if tok.lexeme == "abs" && self.lookahead_is(1, TokenKind::LParen) => {
                self.pos += 2;
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Abs(Box::new(inner)))
            }
            TokenKind::Ident => {
                self.bump();
                // `x[t]` is dataset notation for the sample of `x` at time t.
                if self.lookahead_is(0, TokenKind::LBracket)
                    && self.toks.get(self.pos + 1).is_some_and(|t| t.kind == TokenKind::Ident && t.lexeme == "t")
                    && self.lookahead_is(2, TokenKind::RBracket)
                {
                    self.pos += 3;
                }
                Ok(Expr::Var(tok.lexeme.clone()))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::AbsBar => {
                self.bump();
                let inner = self.expr()?;
                self.expect(TokenKind::AbsBar)?;
                Ok(Expr::Abs(Box::new(inner)))
            }
            _ => {
                self.expect_label("expression");
                Err(Abort::Backtrack)
            }
        }
    }

    fn lookahead_is(&self, offset: usize, kind: TokenKind) -> bool {
        self.toks.get(self.pos + offset).is_some_and(|t| t.kind == kind)
    }

    fn number(&mut self) -> PResult<f64> {
        let tok = self.expect(TokenKind::Number)?;
        match tok.lexeme.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos -= 1;
                self.expect_label("finite number");
                Err(Abort::Fatal(self.syntax_error_here()))
            }
        }
    }

    fn syntax_error_here(&self) -> ParseError {
        let span = self.span_at(self.pos);
        ParseError::Syntax {
            position: span.start,
            span,
            expected: vec!["finite number".to_string()],
            found: self.toks.get(self.pos).map(|t| format!("'{}'", t.lexeme)),
        }
    }

    fn signed_number(&mut self) -> PResult<f64> {
        let negative = self.eat(TokenKind::Arith(ArithOp::Sub));
        let v = self.number()?;
        Ok(if negative { -v } else { v })
    }

    fn window(&mut self) -> PResult<Interval> {
        if self.lookahead_is(0, TokenKind::LBracket) {
            self.interval()
        } else {
            Ok(Interval::unbounded())
        }
    }

    fn interval(&mut self) -> PResult<Interval> {
        let open = self.expect(TokenKind::LBracket)?.span;
        let lo = self.signed_number()?;
        self.expect(TokenKind::Comma)?;
        let hi = self.signed_number()?;
        let close = self.expect(TokenKind::RBracket)?.span;
        Interval::new(lo, hi).map_err(|fault| {
            Abort::Fatal(ParseError::Interval {
                span: open.join(close),
                fault,
                lo,
                hi,
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::CmpOp;

    #[test]
    fn bare_operators_are_unbounded() {
        let f = parse("eventually ( a < 5 )").unwrap();
        assert_eq!(f, Formula::eventually(Interval::unbounded(), atom("a", CmpOp::Lt, 5.0)));
        assert_eq!(f.to_string(), "F ( a < 5 )");
        let g = parse("G (x > 0 U y > 0)").unwrap();
        assert_eq!(g.to_string(), "G ( ( x > 0 ) U ( y > 0 ) )");
        assert_eq!(parse(&g.to_string()).unwrap(), g);
    }

    fn atom(var: &str, cmp: CmpOp, c: f64) -> Formula {
        Formula::atom(Expr::var(var), cmp, Expr::Const(c))
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn automatic_transmission_requirement() {
        let f = parse("G[0,27]((speed > 50) -> F[1,3](rpm < 3000))").unwrap();
        let expected = Formula::always(
            iv(0.0, 27.0),
            Formula::implies(
                atom("speed", CmpOp::Gt, 50.0),
                Formula::eventually(iv(1.0, 3.0), atom("rpm", CmpOp::Lt, 3000.0)),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn single_atom() {
        assert_eq!(parse("x > 0").unwrap(), atom("x", CmpOp::Gt, 0.0));
    }

    #[test]
    fn reversed_interval_reports_bracket_span() {
        let text = "G[5,2](x>0)";
        match parse(text).unwrap_err() {
            ParseError::Interval { span, fault, .. } => {
                assert_eq!(fault, IntervalFault::Reversed);
                assert_eq!(&text[span.start..span.end], "[5,2]");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singular_and_negative_intervals() {
        assert!(matches!(
            parse("F[3,3](x>0)"),
            Err(ParseError::Interval { fault: IntervalFault::Singular, .. })
        ));
        assert!(matches!(
            parse("F[-1,3](x>0)"),
            Err(ParseError::Interval { fault: IntervalFault::Negative, .. })
        ));
    }

    #[test]
    fn precedence_not_temporal_and_or_implies() {
        let f = parse("!a > 0 & b > 0").unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::not(atom("a", CmpOp::Gt, 0.0)), atom("b", CmpOp::Gt, 0.0))
        );

        let f = parse("G[0,1] a > 0 & b > 0").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::always(iv(0.0, 1.0), atom("a", CmpOp::Gt, 0.0)),
                atom("b", CmpOp::Gt, 0.0)
            )
        );

        let f = parse("a > 0 || b > 0 & c > 0").unwrap();
        assert_eq!(
            f,
            Formula::or(
                atom("a", CmpOp::Gt, 0.0),
                Formula::and(atom("b", CmpOp::Gt, 0.0), atom("c", CmpOp::Gt, 0.0))
            )
        );

        let f = parse("a > 0 -> b > 0 -> c > 0").unwrap();
        assert_eq!(
            f,
            Formula::implies(
                atom("a", CmpOp::Gt, 0.0),
                Formula::implies(atom("b", CmpOp::Gt, 0.0), atom("c", CmpOp::Gt, 0.0))
            )
        );

        let f = parse("a > 0 & b > 0 & c > 0").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::and(atom("a", CmpOp::Gt, 0.0), atom("b", CmpOp::Gt, 0.0)),
                atom("c", CmpOp::Gt, 0.0)
            )
        );
    }

    #[test]
    fn until_binds_tighter_than_and() {
        let f = parse("a > 0 U[0,2] b > 0 & c > 0").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::until(iv(0.0, 2.0), atom("a", CmpOp::Gt, 0.0), atom("b", CmpOp::Gt, 0.0)),
                atom("c", CmpOp::Gt, 0.0)
            )
        );
    }

    #[test]
    fn time_indexed_variables_and_abs() {
        let f = parse("G[20,50]((x_1[t] + x_2[t] <= 1.5) U[2,4] (x_3[t] > 2))").unwrap();
        let g = parse("G[20,50]((x_1 + x_2 <= 1.5) U[2,4] (x_3 > 2))").unwrap();
        assert_eq!(f, g);

        let a = parse("|z_2| > 0.5").unwrap();
        let b = parse("abs(z_2) > 0.5").unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a,
            Formula::atom(Expr::Abs(Box::new(Expr::var("z_2"))), CmpOp::Gt, Expr::Const(0.5))
        );
    }

    #[test]
    fn parenthesised_arithmetic_versus_subformula() {
        let f = parse("(x + 1) * 2 > y").unwrap();
        let Formula::Atomic(a) = f else { panic!() };
        assert_eq!(
            a.lhs,
            Expr::bin(
                ArithOp::Mul,
                Expr::bin(ArithOp::Add, Expr::var("x"), Expr::Const(1.0)),
                Expr::Const(2.0)
            )
        );
        assert_eq!(parse("((x > 0))").unwrap(), atom("x", CmpOp::Gt, 0.0));
        assert!(parse("((x + 1 > 0) & (y < 2))").is_ok());
    }

    #[test]
    fn negative_constants_are_negations() {
        let f = parse("z < -0.5").unwrap();
        assert_eq!(
            f,
            Formula::atom(Expr::var("z"), CmpOp::Lt, Expr::Neg(Box::new(Expr::Const(0.5))))
        );
    }

    #[test]
    fn truncated_input_expects_expression() {
        let err = parse("G[0,10] x >").unwrap_err();
        assert_eq!(err.to_string(), "expected expression, found end of input");
        let ParseError::Syntax { position, .. } = err else { panic!() };
        assert_eq!(position, "G[0,10] x >".len());
    }

    #[test]
    fn trailing_garbage_and_empty_input() {
        let err = parse("x > 0 )").unwrap_err();
        assert!(err.to_string().contains("end of input"), "{err}");
        let err = parse("").unwrap_err();
        assert_eq!(err.to_string(), "expected formula, found end of input");
    }

    #[test]
    fn keyword_forms() {
        let f = parse("always [0, 5] (not (x > 1) or eventually[1,2] y < 0)").unwrap();
        let g = parse("G[0,5](!(x > 1) || F[1,2](y < 0))").unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn huge_literal_is_rejected() {
        assert!(parse("x > 1e400").is_err());
    }
}
