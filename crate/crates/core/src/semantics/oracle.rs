use std::collections::HashMap;

use super::{check_variables, EvalError, EvalOptions, HorizonPolicy, Trace, Verdicts};
use crate::syntax::{Atom, Formula, Interval};

/// Satisfaction of `f` at sample time `t`, clause by clause.
pub fn evaluate(f: &Formula, trace: &Trace, t: f64, opts: EvalOptions) -> Result<bool, EvalError> {
    check_variables(f, trace)?;
    let i = trace.index_of(t).ok_or(EvalError::NonSampleTime(t))?;
    Oracle::new(trace, opts).sat(f, i)
}

/// Reference verdicts at every sample.
pub fn evaluate_all(f: &Formula, trace: &Trace, opts: EvalOptions) -> Result<Verdicts, EvalError> {
    check_variables(f, trace)?;
    let mut oracle = Oracle::new(trace, opts);
    (0..trace.len())
        .map(|i| match oracle.sat(f, i) {
            Ok(v) => Ok(Some(v)),
            Err(EvalError::HorizonExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

pub(crate) fn atom_holds(atom: &Atom, trace: &Trace, i: usize) -> bool {
    let lookup = |name: &str| trace.signal(name).map_or(f64::NAN, |s| s[i]);
    atom.cmp.holds(atom.lhs.eval(&lookup), atom.rhs.eval(&lookup))
}

struct Oracle<'a> {
    trace: &'a Trace,
    opts: EvalOptions,
    // Keyed by node address; nested temporal operators revisit the same samples.
    memo: HashMap<(usize, usize), Result<bool, EvalError>>,
}

impl<'a> Oracle<'a> {
    fn new(trace: &'a Trace, opts: EvalOptions) -> Self {
        Self {
            trace,
            opts,
            memo: HashMap::new(),
        }
    }

    fn sat(&mut self, f: &Formula, i: usize) -> Result<bool, EvalError> {
        let key = (f as *const Formula as usize, i);
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let r = self.sat_uncached(f, i);
        self.memo.insert(key, r.clone());
        r
    }

    fn window(&self, i: usize, interval: &Interval) -> Result<Vec<usize>, EvalError> {
        let ts = self.trace.timestamps();
        let t = ts[i];
        let (lo, hi) = (t + interval.lo(), t + interval.hi());
        if self.opts.horizon_policy == HorizonPolicy::Strict && hi > self.trace.horizon() {
            return Err(EvalError::HorizonExceeded {
                time: t,
                needed: hi,
                horizon: self.trace.horizon(),
            });
        }
        Ok((0..ts.len()).filter(|&j| ts[j] >= lo && ts[j] <= hi).collect())
    }

    fn sat_uncached(&mut self, f: &Formula, i: usize) -> Result<bool, EvalError> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atomic(a) => Ok(atom_holds(a, self.trace, i)),
            Formula::Not(g) => Ok(!self.sat(g, i)?),
            Formula::And(a, b) => {
                let (x, y) = (self.sat(a, i)?, self.sat(b, i)?);
                Ok(x && y)
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.sat(a, i)?, self.sat(b, i)?);
                Ok(x || y)
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.sat(a, i)?, self.sat(b, i)?);
                Ok(!x || y)
            }
            Formula::Always(iv, g) => {
                let w = self.window(i, iv)?;
                let vals = w.into_iter().map(|j| self.sat(g, j)).collect::<Result<Vec<_>, _>>()?;
                Ok(vals.into_iter().all(|v| v))
            }
            Formula::Eventually(iv, g) => {
                let w = self.window(i, iv)?;
                let vals = w.into_iter().map(|j| self.sat(g, j)).collect::<Result<Vec<_>, _>>()?;
                Ok(vals.into_iter().any(|v| v))
            }
            Formula::Until(iv, a, b) => {
                let w = self.window(i, iv)?;
                let last = w.last().copied();
                // φ1 is needed on every sample from t through the end of the window.
                let lhs = match last {
                    Some(end) => (i..=end).map(|k| self.sat(a, k)).collect::<Result<Vec<_>, _>>()?,
                    None => Vec::new(),
                };
                let rhs = w.iter().map(|&j| self.sat(b, j)).collect::<Result<Vec<_>, _>>()?;
                Ok(w.iter().zip(&rhs).any(|(&j, &hit)| {
                    hit && lhs[..=j - i].iter().all(|&v| v)
                }))
            }
        }
    }
}
