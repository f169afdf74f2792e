use super::*;
use crate::syntax::parse;

fn trace(times: &[f64], cols: &[(&str, &[f64])]) -> Trace {
    Trace::from_columns(times, cols).unwrap()
}

fn both(src: &str, tr: &Trace, opts: EvalOptions) -> Verdicts {
    let f = parse(src).unwrap();
    let reference = evaluate_all(&f, tr, opts).unwrap();
    assert_eq!(evaluate_windowed(&f, tr, opts).unwrap(), reference, "{src}");
    reference
}

fn at_trace() -> Trace {
    trace(
        &[0.0, 10.0, 20.0, 27.0, 30.0],
        &[
            ("speed", &[60.0, 60.0, 40.0, 40.0, 40.0]),
            ("rpm", &[4000.0, 4000.0, 2500.0, 2500.0, 2500.0]),
        ],
    )
}

#[test]
fn true_holds_everywhere() {
    let tr = trace(&[0.0, 1.0, 2.0], &[("x", &[0.0, 0.0, 0.0])]);
    assert!(evaluate(&Formula::True, &tr, 1.0, EvalOptions::default()).unwrap());
    assert_eq!(both("true", &tr, EvalOptions::default()), vec![Some(true); 3]);
}

#[test]
fn pointwise_atom() {
    let tr = trace(&[0.0, 1.0, 2.0], &[("x", &[0.0, 2.0, 0.0])]);
    assert_eq!(
        both("x > 1", &tr, EvalOptions::default()),
        vec![Some(false), Some(true), Some(false)]
    );
}

#[test]
fn always_over_clipped_windows() {
    let tr = trace(&[0.0, 1.0, 2.0], &[("x", &[1.0, 1.0, 0.0])]);
    assert_eq!(
        both("G[0,1](x>0)", &tr, EvalOptions::clip()),
        vec![Some(true), Some(false), Some(false)]
    );
}

#[test]
fn eventually_reaches_last_sample() {
    let tr = trace(&[0.0, 1.0, 2.0], &[("x", &[1.0, 2.0, 3.0])]);
    let f = parse("F[0,2](x>2)").unwrap();
    assert!(evaluate(&f, &tr, 0.0, EvalOptions::default()).unwrap());
}

#[test]
fn response_formula_fails_on_empty_windows() {
    let f = parse("G[0,27](speed>50 -> F[1,3](rpm<3000))").unwrap();
    let tr = at_trace();
    assert!(!evaluate(&f, &tr, 0.0, EvalOptions::clip()).unwrap());
    // From t = 20 on the antecedent is false everywhere.
    let all = both("G[0,27](speed>50 -> F[1,3](rpm<3000))", &tr, EvalOptions::clip());
    assert_eq!(all, vec![Some(false), Some(false), Some(true), Some(true), Some(true)]);
}

#[test]
fn strict_policy_marks_trailing_samples() {
    let tr = at_trace();
    let f = parse("F[0,10](rpm < 3000)").unwrap();
    let err = evaluate(&f, &tr, 27.0, EvalOptions::strict()).unwrap_err();
    assert!(matches!(err, EvalError::HorizonExceeded { needed, .. } if needed == 37.0));
    assert_eq!(
        both("F[0,10](rpm < 3000)", &tr, EvalOptions::strict()),
        vec![Some(false), Some(true), Some(true), None, None]
    );
}

#[test]
fn vacuous_empty_windows() {
    let tr = trace(&[0.0, 10.0], &[("x", &[0.0, 0.0])]);
    let opts = EvalOptions::clip();
    assert_eq!(both("G[1,2](x > 5)", &tr, opts)[0], Some(true));
    assert_eq!(both("F[1,2](x < 5)", &tr, opts)[0], Some(false));
    assert_eq!(both("(x < 5) U[1,2] (x < 5)", &tr, opts)[0], Some(false));
}

#[test]
fn until_needs_left_operand_through_witness() {
    let tr = trace(
        &[0.0, 1.0, 2.0, 3.0],
        &[("a", &[1.0, 1.0, 0.0, 1.0]), ("b", &[0.0, 0.0, 1.0, 1.0])],
    );
    let opts = EvalOptions::clip();
    // Closed [t, t'] includes the witness itself, so a must hold at t' too.
    assert_eq!(
        both("(a > 0) U[0,3] (b > 0)", &tr, opts),
        vec![Some(false), Some(false), Some(false), Some(true)]
    );
    assert_eq!(
        both("(a >= 0) U[1,3] (b > 0)", &tr, opts),
        vec![Some(true), Some(true), Some(true), Some(false)]
    );
}

#[test]
fn error_cases() {
    let tr = at_trace();
    let f = parse("G[0,1](gear > 2)").unwrap();
    assert_eq!(
        evaluate_all(&f, &tr, EvalOptions::default()),
        Err(EvalError::UnknownVariable("gear".into()))
    );
    assert_eq!(
        evaluate_windowed(&f, &tr, EvalOptions::default()),
        Err(EvalError::UnknownVariable("gear".into()))
    );
    let g = parse("speed > 0").unwrap();
    assert_eq!(
        evaluate(&g, &tr, 5.0, EvalOptions::default()),
        Err(EvalError::NonSampleTime(5.0))
    );
}

#[test]
fn arithmetic_atoms() {
    let tr = trace(&[0.0, 1.0], &[("x", &[-3.0, 1.0]), ("y", &[1.0, 1.0])]);
    assert_eq!(
        both("|x| + y * 2 >= 4", &tr, EvalOptions::default()),
        vec![Some(true), Some(false)]
    );
}
