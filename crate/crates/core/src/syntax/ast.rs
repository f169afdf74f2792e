use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Closed, non-singular time window `[lo, hi]` attached to a temporal operator.
/// An operator written without a window carries `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "IntervalRepr", try_from = "IntervalRepr")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalFault {
    Negative,
    Singular,
    Reversed,
    NonFinite,
}

impl fmt::Display for IntervalFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            IntervalFault::Negative => "negative interval bound",
            IntervalFault::Singular => "singular interval",
            IntervalFault::Reversed => "interval lower bound exceeds upper bound",
            IntervalFault::NonFinite => "interval bound is not finite",
        };
        f.write_str(msg)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalFault> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalFault::NonFinite);
        }
        if lo < 0.0 || hi < 0.0 {
            return Err(IntervalFault::Negative);
        }
        if lo == hi {
            return Err(IntervalFault::Singular);
        }
        if lo > hi {
            return Err(IntervalFault::Reversed);
        }
        Ok(Self { lo, hi })
    }

    pub fn unbounded() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY }
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: f64,
    hi: Option<f64>,
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        Self {
            lo: i.lo,
            hi: i.is_bounded().then_some(i.hi),
        }
    }
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = String;

    fn try_from(r: IntervalRepr) -> Result<Self, String> {
        match r.hi {
            Some(hi) => Interval::new(r.lo, hi).map_err(|e| e.to_string()),
            None if r.lo == 0.0 => Ok(Interval::unbounded()),
            None => Err("unbounded interval must start at 0".into()),
        }
    }
}

/// Empty for the unbounded window, so the operator prints bare.
impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bounded() {
            write!(f, "[{},{}]", self.lo, self.hi)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a / b,
        }
    }
}

/// Arithmetic term over signal variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Var(String),
    Const(f64),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn bin(op: ArithOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn has_variable(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Const(_) => false,
            Expr::Neg(e) | Expr::Abs(e) => e.has_variable(),
            Expr::Bin(_, a, b) => a.has_variable() || b.has_variable(),
        }
    }

    pub fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Var(name) => {
                out.insert(name.as_str());
            }
            Expr::Const(_) => {}
            Expr::Neg(e) | Expr::Abs(e) => e.collect_variables(out),
            Expr::Bin(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Evaluates the term given a variable lookup.
    pub fn eval<F>(&self, lookup: &F) -> f64
    where
        F: Fn(&str) -> f64,
    {
        match self {
            Expr::Var(name) => lookup(name),
            Expr::Const(v) => *v,
            Expr::Neg(e) => -e.eval(lookup),
            Expr::Abs(e) => e.eval(lookup).abs(),
            Expr::Bin(op, a, b) => op.apply(a.eval(lookup), b.eval(lookup)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

/// Atomic predicate `lhs cmp rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub lhs: Expr,
    pub cmp: CmpOp,
    pub rhs: Expr,
}

impl Atom {
    pub fn new(lhs: Expr, cmp: CmpOp, rhs: Expr) -> Self {
        Self { lhs, cmp, rhs }
    }

    /// Both sides are constant; legal, but almost always a modelling slip.
    pub fn is_degenerate(&self) -> bool {
        !self.lhs.has_variable() && !self.rhs.has_variable()
    }

    /// Rewrites a strict comparison into the `f > 0` shape. `<=`, `>=`,
    /// `==` and `!=` have no strict positive form and yield `None`.
    pub fn to_positive_form(&self) -> Option<Atom> {
        let zero = Expr::Const(0.0);
        match self.cmp {
            CmpOp::Gt => Some(Atom::new(
                Expr::bin(ArithOp::Sub, self.lhs.clone(), self.rhs.clone()),
                CmpOp::Gt,
                zero,
            )),
            CmpOp::Lt => Some(Atom::new(
                Expr::bin(ArithOp::Sub, self.rhs.clone(), self.lhs.clone()),
                CmpOp::Gt,
                zero,
            )),
            _ => None,
        }
    }
}

/// STL formula tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Atomic(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Always(Interval, Box<Formula>),
    Eventually(Interval, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(lhs: Expr, cmp: CmpOp, rhs: Expr) -> Self {
        Formula::Atomic(Atom::new(lhs, cmp, rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn always(i: Interval, f: Formula) -> Self {
        Formula::Always(i, Box::new(f))
    }

    pub fn eventually(i: Interval, f: Formula) -> Self {
        Formula::Eventually(i, Box::new(f))
    }

    pub fn until(i: Interval, a: Formula, b: Formula) -> Self {
        Formula::Until(i, Box::new(a), Box::new(b))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atomic(_) => vec![],
            Formula::Not(f) | Formula::Always(_, f) | Formula::Eventually(_, f) => vec![f],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(_, a, b) => vec![a, b],
        }
    }

    pub fn is_operator(&self) -> bool {
        !matches!(self, Formula::True | Formula::False | Formula::Atomic(_))
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        if let Formula::Atomic(a) = self {
            a.lhs.collect_variables(out);
            a.rhs.collect_variables(out);
        }
        for c in self.children() {
            c.collect_variables(out);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Longest chain of temporal upper bounds from the root; the look-ahead
    /// a sample needs before its verdict is fully determined.
    pub fn horizon(&self) -> f64 {
        let inner = self
            .children()
            .iter()
            .map(|c| c.horizon())
            .fold(0.0, f64::max);
        match self {
            Formula::Always(i, _) | Formula::Eventually(i, _) | Formula::Until(i, _, _) => {
                i.hi() + inner
            }
            _ => inner,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::format(self))
    }
}
