use super::oracle::atom_holds;
use super::{check_variables, EvalError, EvalOptions, HorizonPolicy, Trace, Verdicts};
use crate::syntax::{Formula, Interval};

/// Verdicts at every sample, computed bottom-up in `O(n)` per node.
pub fn evaluate_windowed(f: &Formula, trace: &Trace, opts: EvalOptions) -> Result<Verdicts, EvalError> {
    check_variables(f, trace)?;
    let out = Eval { trace, opts }.node(f);
    Ok(out
        .value
        .into_iter()
        .zip(out.defined)
        .map(|(v, d)| d.then_some(v))
        .collect())
}

struct Signal {
    value: Vec<bool>,
    defined: Vec<bool>,
}

/// Prefix counts of `true` entries; `count(a, b)` covers `[a, b)`.
struct Prefix(Vec<usize>);

impl Prefix {
    fn of(bits: impl Iterator<Item = bool>) -> Self {
        let mut acc = vec![0];
        for b in bits {
            acc.push(acc.last().unwrap() + b as usize);
        }
        Prefix(acc)
    }

    fn count(&self, a: usize, b: usize) -> usize {
        if b <= a {
            0
        } else {
            self.0[b] - self.0[a]
        }
    }
}

struct Windows {
    start: Vec<usize>,
    end: Vec<usize>,
    in_horizon: Vec<bool>,
}

struct Eval<'a> {
    trace: &'a Trace,
    opts: EvalOptions,
}

impl Eval<'_> {
    fn windows(&self, iv: &Interval) -> Windows {
        let ts = self.trace.timestamps();
        let n = ts.len();
        let horizon = self.trace.horizon();
        let (mut a, mut b) = (0, 0);
        let mut w = Windows {
            start: Vec::with_capacity(n),
            end: Vec::with_capacity(n),
            in_horizon: Vec::with_capacity(n),
        };
        for &t in ts {
            let (lo, hi) = (t + iv.lo(), t + iv.hi());
            while a < n && ts[a] < lo {
                a += 1;
            }
            b = b.max(a);
            while b < n && ts[b] <= hi {
                b += 1;
            }
            w.start.push(a);
            w.end.push(b);
            w.in_horizon
                .push(self.opts.horizon_policy == HorizonPolicy::Clip || hi <= horizon);
        }
        w
    }

    fn node(&self, f: &Formula) -> Signal {
        let n = self.trace.len();
        let pointwise = |value: Vec<bool>, defined: Vec<bool>| Signal { value, defined };
        match f {
            Formula::True => pointwise(vec![true; n], vec![true; n]),
            Formula::False => pointwise(vec![false; n], vec![true; n]),
            Formula::Atomic(a) => pointwise((0..n).map(|i| atom_holds(a, self.trace, i)).collect(), vec![true; n]),
            Formula::Not(g) => {
                let s = self.node(g);
                pointwise(s.value.iter().map(|v| !v).collect(), s.defined)
            }
            Formula::And(a, b) => self.combine(a, b, |x, y| x && y),
            Formula::Or(a, b) => self.combine(a, b, |x, y| x || y),
            Formula::Implies(a, b) => self.combine(a, b, |x, y| !x || y),
            Formula::Always(iv, g) => {
                let s = self.node(g);
                let w = self.windows(iv);
                let falses = Prefix::of(s.value.iter().map(|v| !v));
                let undefined = Prefix::of(s.defined.iter().map(|d| !d));
                Signal {
                    value: (0..n).map(|i| falses.count(w.start[i], w.end[i]) == 0).collect(),
                    defined: (0..n)
                        .map(|i| w.in_horizon[i] && undefined.count(w.start[i], w.end[i]) == 0)
                        .collect(),
                }
            }
            Formula::Eventually(iv, g) => {
                let s = self.node(g);
                let w = self.windows(iv);
                let trues = Prefix::of(s.value.iter().copied());
                let undefined = Prefix::of(s.defined.iter().map(|d| !d));
                Signal {
                    value: (0..n).map(|i| trues.count(w.start[i], w.end[i]) > 0).collect(),
                    defined: (0..n)
                        .map(|i| w.in_horizon[i] && undefined.count(w.start[i], w.end[i]) == 0)
                        .collect(),
                }
            }
            Formula::Until(iv, a, b) => {
                let lhs = self.node(a);
                let rhs = self.node(b);
                let w = self.windows(iv);
                // next_false[i]: first k >= i where the left operand fails.
                let mut next_false = vec![n; n + 1];
                for i in (0..n).rev() {
                    next_false[i] = if lhs.value[i] { next_false[i + 1] } else { i };
                }
                let hits = Prefix::of(rhs.value.iter().copied());
                let lhs_undef = Prefix::of(lhs.defined.iter().map(|d| !d));
                let rhs_undef = Prefix::of(rhs.defined.iter().map(|d| !d));
                Signal {
                    value: (0..n)
                        .map(|i| hits.count(w.start[i], w.end[i].min(next_false[i])) > 0)
                        .collect(),
                    defined: (0..n)
                        .map(|i| {
                            let lhs_end = if w.end[i] > w.start[i] { w.end[i] } else { i };
                            w.in_horizon[i]
                                && lhs_undef.count(i, lhs_end) == 0
                                && rhs_undef.count(w.start[i], w.end[i]) == 0
                        })
                        .collect(),
                }
            }
        }
    }

    fn combine(&self, a: &Formula, b: &Formula, op: impl Fn(bool, bool) -> bool) -> Signal {
        let x = self.node(a);
        let y = self.node(b);
        Signal {
            value: x.value.iter().zip(&y.value).map(|(&p, &q)| op(p, q)).collect(),
            defined: x.defined.iter().zip(&y.defined).map(|(&p, &q)| p && q).collect(),
        }
    }
}
