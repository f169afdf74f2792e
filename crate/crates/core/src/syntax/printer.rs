//! Canonical rendering. Tokens are separated by single spaces, intervals are
//! glued to their operator (`G[0,27]`), temporal operands are always wrapped
//! in parentheses, atoms below the root carry exactly one pair of
//! parentheses, and every binary operand of `->` is parenthesised.

use super::ast::{ArithOp, Expr, Formula};

/// Structural view shared by formulas and templates.
pub(crate) enum Node<'a, T> {
    /// Rendered leaf; `atomic` leaves are parenthesised when nested.
    Leaf { text: String, atomic: bool },
    Not(&'a T),
    And(&'a T, &'a T),
    Or(&'a T, &'a T),
    Implies(&'a T, &'a T),
    Temporal { op: &'static str, interval: String, body: &'a T },
    Until { interval: String, lhs: &'a T, rhs: &'a T },
}

pub(crate) trait Printable: Sized {
    fn node(&self) -> Node<'_, Self>;
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNTIL: u8 = 4;
const UNARY: u8 = 5;
const LEAF: u8 = 6;

fn precedence<T: Printable>(n: &T) -> u8 {
    match n.node() {
        Node::Leaf { .. } => LEAF,
        Node::Not(_) | Node::Temporal { .. } => UNARY,
        Node::Until { .. } => UNTIL,
        Node::And(..) => AND,
        Node::Or(..) => OR,
        Node::Implies(..) => IMPLIES,
    }
}

pub(crate) fn render<T: Printable>(root: &T) -> String {
    let mut out = Vec::new();
    emit(root, true, &mut out);
    out.join(" ")
}

/// `delimited` is true at the root and directly inside temporal parentheses,
/// where an atom needs no parentheses of its own.
fn emit<T: Printable>(n: &T, delimited: bool, out: &mut Vec<String>) {
    match n.node() {
        Node::Leaf { text, atomic } => {
            if atomic && !delimited {
                out.push("(".into());
                out.push(text);
                out.push(")".into());
            } else {
                out.push(text);
            }
        }
        Node::Not(c) => {
            out.push("!".into());
            child(c, precedence(c) < UNARY, out);
        }
        Node::Temporal { op, interval, body } => {
            out.push(format!("{op}{interval}"));
            out.push("(".into());
            emit(body, true, out);
            out.push(")".into());
        }
        Node::And(a, b) => binary(a, "&", b, AND, out),
        Node::Or(a, b) => binary(a, "||", b, OR, out),
        Node::Implies(a, b) => {
            child(a, precedence(a) <= UNTIL, out);
            out.push("->".into());
            child(b, precedence(b) <= UNTIL, out);
        }
        Node::Until { interval, lhs, rhs } => {
            child(lhs, precedence(lhs) <= UNTIL, out);
            out.push(format!("U{interval}"));
            child(rhs, precedence(rhs) < UNTIL, out);
        }
    }
}

fn binary<T: Printable>(a: &T, op: &str, b: &T, level: u8, out: &mut Vec<String>) {
    child(a, precedence(a) < level, out);
    out.push(op.into());
    child(b, precedence(b) <= level, out);
}

fn child<T: Printable>(n: &T, wrap: bool, out: &mut Vec<String>) {
    if wrap {
        out.push("(".into());
        emit(n, true, out);
        out.push(")".into());
    } else {
        emit(n, false, out);
    }
}

impl Printable for Formula {
    fn node(&self) -> Node<'_, Self> {
        match self {
            Formula::True => Node::Leaf { text: "true".into(), atomic: false },
            Formula::False => Node::Leaf { text: "false".into(), atomic: false },
            Formula::Atomic(a) => Node::Leaf {
                text: format!("{} {} {}", format_expr(&a.lhs), a.cmp.symbol(), format_expr(&a.rhs)),
                atomic: true,
            },
            Formula::Not(f) => Node::Not(f),
            Formula::And(a, b) => Node::And(a, b),
            Formula::Or(a, b) => Node::Or(a, b),
            Formula::Implies(a, b) => Node::Implies(a, b),
            Formula::Always(i, f) => Node::Temporal { op: "G", interval: i.to_string(), body: f },
            Formula::Eventually(i, f) => Node::Temporal { op: "F", interval: i.to_string(), body: f },
            Formula::Until(i, a, b) => Node::Until { interval: i.to_string(), lhs: a, rhs: b },
        }
    }
}

/// Canonical ASCII rendering of a formula.
pub fn format(f: &Formula) -> String {
    render(f)
}

fn expr_precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(ArithOp::Add | ArithOp::Sub, ..) => 1,
        Expr::Bin(ArithOp::Mul | ArithOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Var(_) | Expr::Const(_) | Expr::Abs(_) => 4,
    }
}

/// Canonical rendering of an arithmetic term, single-spaced.
pub fn format_expr(e: &Expr) -> String {
    let mut out = Vec::new();
    emit_expr(e, &mut out);
    out.join(" ")
}

fn emit_expr(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Var(name) => out.push(name.clone()),
        Expr::Const(v) if *v < 0.0 => {
            out.push("-".into());
            out.push(format!("{}", -v));
        }
        Expr::Const(v) => out.push(format!("{v}")),
        Expr::Neg(inner) => {
            out.push("-".into());
            expr_child(inner, expr_precedence(inner) < 3, out);
        }
        Expr::Abs(inner) => {
            out.push("|".into());
            emit_expr(inner, out);
            out.push("|".into());
        }
        Expr::Bin(op, a, b) => {
            let p = expr_precedence(e);
            expr_child(a, expr_precedence(a) < p, out);
            out.push(op.symbol().into());
            expr_child(b, expr_precedence(b) <= p, out);
        }
    }
}

fn expr_child(e: &Expr, wrap: bool, out: &mut Vec<String>) {
    if wrap {
        out.push("(".into());
        emit_expr(e, out);
        out.push(")".into());
    } else {
        emit_expr(e, out);
    }
}
