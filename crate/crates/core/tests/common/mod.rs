#![allow(dead_code)]

use nlstl_core::semantics::Trace;
use nlstl_core::syntax::{ArithOp, CmpOp, Expr, Formula, Interval};
use proptest::prelude::*;

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub fn cmp_op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Lt),
        Just(CmpOp::Le),
        Just(CmpOp::Gt),
        Just(CmpOp::Ge),
        Just(CmpOp::Eq),
        Just(CmpOp::Ne),
    ]
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => prop::sample::select(VARS.to_vec()).prop_map(Expr::var),
        2 => (0i32..=6).prop_map(|v| Expr::constant(v as f64 / 2.0)),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Abs(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (
                prop_oneof![Just(ArithOp::Add), Just(ArithOp::Sub), Just(ArithOp::Mul), Just(ArithOp::Div)],
                inner.clone(),
                inner
            )
                .prop_map(|(op, a, b)| Expr::bin(op, a, b)),
        ]
    })
}

/// Bounds on a half-unit grid so window edges coincide with sample times;
/// occasionally the bare unbounded window.
pub fn interval() -> impl Strategy<Value = Interval> {
    prop_oneof![
        9 => (0u32..8, 1u32..8).prop_map(|(lo, width)| {
            Interval::new(lo as f64 / 2.0, (lo + width) as f64 / 2.0).unwrap()
        }),
        1 => Just(Interval::unbounded()),
    ]
}

pub fn atom_formula() -> impl Strategy<Value = Formula> {
    (expr(), cmp_op(), expr()).prop_map(|(l, c, r)| Formula::atom(l, c, r))
}

/// Random formulas of nesting depth at most `depth` over [`VARS`].
pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => atom_formula(),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (interval(), inner.clone()).prop_map(|(i, f)| Formula::always(i, f)),
            (interval(), inner.clone()).prop_map(|(i, f)| Formula::eventually(i, f)),
            (interval(), inner.clone(), inner).prop_map(|(i, a, b)| Formula::until(i, a, b)),
        ]
    })
}

/// Traces with 1..=`max_len` samples over x, y, z.
pub fn trace(max_len: usize) -> impl Strategy<Value = Trace> {
    (1..=max_len).prop_flat_map(|n| {
        (
            0u32..3,
            prop::collection::vec(prop::sample::select(vec![0.5, 1.0, 1.5, 2.0]), n - 1),
            prop::collection::vec(prop::collection::vec(-6i32..=6, n), 3),
        )
            .prop_map(|(start, gaps, cols)| {
                let mut ts = vec![start as f64 / 2.0];
                for g in gaps {
                    ts.push(ts.last().unwrap() + g);
                }
                Trace::new(
                    ts,
                    VARS.iter()
                        .zip(cols)
                        .map(|(v, c)| (v.to_string(), c.into_iter().map(|x| x as f64 / 2.0).collect())),
                )
                .unwrap()
            })
    })
}
