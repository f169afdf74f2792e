use serde::{Deserialize, Serialize};

use super::ast::Formula;
use super::printer::{render, Node, Printable};

/// Formula skeleton: atoms become the placeholder `φ` and interval bounds
/// become the placeholder `I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Template {
    True,
    False,
    Slot,
    Not(Box<Template>),
    And(Box<Template>, Box<Template>),
    Or(Box<Template>, Box<Template>),
    Implies(Box<Template>, Box<Template>),
    Always(Box<Template>),
    Eventually(Box<Template>),
    Until(Box<Template>, Box<Template>),
}

pub const SLOT: &str = "φ";
const INTERVAL_SLOT: &str = "[I]";

/// Abstracts every atom and every interval bound. Identical neighbouring
/// slots are kept separate so the skeleton keeps its shape.
pub fn extract_template(f: &Formula) -> Template {
    let b = |f: &Formula| Box::new(extract_template(f));
    match f {
        Formula::True => Template::True,
        Formula::False => Template::False,
        Formula::Atomic(_) => Template::Slot,
        Formula::Not(x) => Template::Not(b(x)),
        Formula::And(x, y) => Template::And(b(x), b(y)),
        Formula::Or(x, y) => Template::Or(b(x), b(y)),
        Formula::Implies(x, y) => Template::Implies(b(x), b(y)),
        Formula::Always(_, x) => Template::Always(b(x)),
        Formula::Eventually(_, x) => Template::Eventually(b(x)),
        Formula::Until(_, x, y) => Template::Until(b(x), b(y)),
    }
}

impl Template {
    pub fn slot_count(&self) -> usize {
        match self {
            Template::Slot => 1,
            Template::True | Template::False => 0,
            Template::Not(x) | Template::Always(x) | Template::Eventually(x) => x.slot_count(),
            Template::And(x, y) | Template::Or(x, y) | Template::Implies(x, y) | Template::Until(x, y) => {
                x.slot_count() + y.slot_count()
            }
        }
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

impl std::fmt::Display for Template {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

impl Printable for Template {
    fn node(&self) -> Node<'_, Self> {
        match self {
            Template::True => Node::Leaf { text: "true".into(), atomic: false },
            Template::False => Node::Leaf { text: "false".into(), atomic: false },
            Template::Slot => Node::Leaf { text: SLOT.into(), atomic: false },
            Template::Not(x) => Node::Not(x),
            Template::And(x, y) => Node::And(x, y),
            Template::Or(x, y) => Node::Or(x, y),
            Template::Implies(x, y) => Node::Implies(x, y),
            Template::Always(x) => Node::Temporal { op: "G", interval: INTERVAL_SLOT.into(), body: x },
            Template::Eventually(x) => Node::Temporal { op: "F", interval: INTERVAL_SLOT.into(), body: x },
            Template::Until(x, y) => Node::Until { interval: INTERVAL_SLOT.into(), lhs: x, rhs: y },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, tokenize, TokenKind};

    fn tmpl(src: &str) -> String {
        extract_template(&parse(src).unwrap()).render()
    }

    #[test]
    fn eventually_template() {
        assert_eq!(tmpl("F[0,5](a < 5)"), "F[I] ( φ )");
    }

    #[test]
    fn atom_template() {
        assert_eq!(tmpl("x > 0"), "φ");
    }

    #[test]
    fn automatic_transmission_template() {
        assert_eq!(
            tmpl("G[0,27]((speed > 50) -> F[1,3](rpm < 3000))"),
            "G[I] ( φ -> F[I] ( φ ) )"
        );
    }

    #[test]
    fn adjacent_slots_are_not_merged() {
        assert_eq!(tmpl("a > 0 & b > 0 & c > 0"), "φ & φ & φ");
        assert_eq!(extract_template(&parse("a > 0 & b > 0 & c > 0").unwrap()).slot_count(), 3);
    }

    #[test]
    fn rendered_template_has_no_numbers() {
        let t = tmpl("G[0.5,2.25](x + 3 > 4 U[1,7] y < 2)");
        let toks = tokenize(&t).unwrap();
        assert!(toks.iter().all(|t| t.kind != TokenKind::Number), "{t}");
        assert!(toks.iter().all(|t| t.kind != TokenKind::Cmp(crate::syntax::CmpOp::Gt)));
    }
}
