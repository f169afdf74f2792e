use super::ast::Formula;

/// Reduces a formula to the core connectives `true`, `false`, atoms, `!`,
/// `&` and `U`:
///
/// * `F_I φ  ≡ true U_I φ`
/// * `G_I φ  ≡ !F_I !φ`
/// * `a || b ≡ !(!a & !b)`
/// * `a -> b ≡ !a || b`
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atomic(_) => f.clone(),
        Formula::Not(x) => Formula::not(desugar(x)),
        Formula::And(a, b) => Formula::and(desugar(a), desugar(b)),
        Formula::Or(a, b) => or_core(desugar(a), desugar(b)),
        Formula::Implies(a, b) => or_core(Formula::not(desugar(a)), desugar(b)),
        Formula::Until(i, a, b) => Formula::until(*i, desugar(a), desugar(b)),
        Formula::Eventually(i, x) => Formula::until(*i, Formula::True, desugar(x)),
        Formula::Always(i, x) => {
            Formula::not(Formula::until(*i, Formula::True, Formula::not(desugar(x))))
        }
    }
}

fn or_core(a: Formula, b: Formula) -> Formula {
    Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
}

/// True when only core connectives remain.
pub fn is_core(f: &Formula) -> bool {
    let here = matches!(
        f,
        Formula::True
            | Formula::False
            | Formula::Atomic(_)
            | Formula::Not(_)
            | Formula::And(..)
            | Formula::Until(..)
    );
    here && f.children().into_iter().all(is_core)
}

/// Pre-order listing of every formula node, the root and atoms included.
pub fn subformulas(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    let mut stack = vec![f];
    while let Some(n) = stack.pop() {
        out.push(n);
        stack.extend(n.children().into_iter().rev());
    }
    out
}

/// Number of `! & || -> G F U` nodes.
pub fn count_operators(f: &Formula) -> usize {
    subformulas(f).into_iter().filter(|n| n.is_operator()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Interval};

    const AT: &str = "G[0,27]((speed > 50) -> F[1,3](rpm < 3000))";

    #[test]
    fn eventually_becomes_until() {
        let i = Interval::new(0.0, 2.0).unwrap();
        let phi = parse("x > 0").unwrap();
        assert_eq!(
            desugar(&Formula::eventually(i, phi.clone())),
            Formula::until(i, Formula::True, phi)
        );
    }

    #[test]
    fn always_becomes_negated_until() {
        let i = Interval::new(1.0, 2.0).unwrap();
        let phi = parse("x > 0").unwrap();
        assert_eq!(
            desugar(&Formula::always(i, phi.clone())),
            Formula::not(Formula::until(i, Formula::True, Formula::not(phi)))
        );
    }

    #[test]
    fn or_becomes_de_morgan() {
        let a = parse("a > 0").unwrap();
        let b = parse("b > 0").unwrap();
        assert_eq!(
            desugar(&Formula::or(a.clone(), b.clone())),
            Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
        );
    }

    #[test]
    fn desugar_output_is_core_and_idempotent() {
        let f = parse(AT).unwrap();
        let d = desugar(&f);
        assert!(is_core(&d));
        assert!(!is_core(&f));
        assert_eq!(desugar(&d), d);
    }

    #[test]
    fn subformula_counts() {
        let x = parse("x > 0").unwrap();
        assert_eq!(subformulas(&x), vec![&x]);

        let f = parse("a > 0 & b > 0").unwrap();
        let subs = subformulas(&f);
        assert_eq!(subs.len(), 3);
        assert_eq!(subs[0], &f);
        assert_eq!(subs[1], &parse("a > 0").unwrap());
        assert_eq!(subs[2], &parse("b > 0").unwrap());

        let at = parse(AT).unwrap();
        let subs = subformulas(&at);
        assert_eq!(subs.len(), 5);
        assert!(matches!(subs[0], Formula::Always(..)));
        assert!(matches!(subs[1], Formula::Implies(..)));
        assert!(matches!(subs[2], Formula::Atomic(..)));
        assert!(matches!(subs[3], Formula::Eventually(..)));
        assert!(matches!(subs[4], Formula::Atomic(..)));
    }

    #[test]
    fn operator_counts() {
        assert_eq!(count_operators(&parse("x > 0").unwrap()), 0);
        assert_eq!(count_operators(&parse(AT).unwrap()), 3);
        assert_eq!(count_operators(&Formula::not(Formula::not(Formula::True))), 2);
    }
}
