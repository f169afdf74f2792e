mod common;

use common::{formula, trace};
use nlstl_core::semantics::{evaluate_all, EvalOptions};
use nlstl_core::syntax::{count_operators, desugar, extract_template, format, is_core, parse, subformulas, tokenize};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(f in formula(4)) {
        let text = format(&f);
        prop_assert_eq!(parse(&text).unwrap(), f);
    }

    #[test]
    fn canonical_text_is_a_fixed_point(f in formula(4)) {
        let once = format(&f);
        prop_assert_eq!(format(&parse(&once).unwrap()), once.clone());
        let lexed: String = tokenize(&once).unwrap().into_iter().map(|t| t.lexeme).collect();
        prop_assert_eq!(lexed, once.split_whitespace().collect::<String>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn desugared_form_is_core_and_equivalent(f in formula(3), tr in trace(24)) {
        let d = desugar(&f);
        prop_assert!(is_core(&d));
        prop_assert_eq!(
            evaluate_all(&d, &tr, EvalOptions::clip()).unwrap(),
            evaluate_all(&f, &tr, EvalOptions::clip()).unwrap()
        );
    }

    #[test]
    fn operators_fit_inside_the_tree(f in formula(4)) {
        prop_assert!(count_operators(&f) < subformulas(&f).len());
    }

    #[test]
    fn template_survives_printing(f in formula(3)) {
        prop_assert_eq!(extract_template(&parse(&format(&f)).unwrap()), extract_template(&f));
    }
}

#[test]
fn bundled_seeds_round_trip() {
    for p in nlstl_core::fixtures::seed_pairs() {
        let f = parse(&p.stl).unwrap();
        assert_eq!(format(&f), p.stl, "{}", p.id);
    }
}
