//! Boolean satisfaction `(v, t) ⊨ φ` over finite sampled traces.
//!
//! Temporal quantifiers range over the sample timestamps that fall inside the
//! closed window `[t + lo, t + hi]`. An empty window makes `G` true and `F`
//! and `U` false. There is no interpolation between samples.
//!
//! Two evaluators are provided: [`evaluate`]/[`evaluate_all`] apply the
//! satisfaction clauses directly and serve as the reference, and
//! [`evaluate_windowed`] computes one verdict vector per sub-formula with
//! prefix counts over monotone windows.

mod oracle;
mod trace;
mod windowed;

use serde::{Deserialize, Serialize};

use crate::syntax::Formula;

pub use oracle::{evaluate, evaluate_all};
pub use trace::{Trace, TraceError};
pub use windowed::evaluate_windowed;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonPolicy {
    /// Windows are truncated at the trace horizon.
    #[default]
    Clip,
    /// A window reaching past the horizon makes the verdict undefined.
    Strict,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub horizon_policy: HorizonPolicy,
}

impl EvalOptions {
    pub fn strict() -> Self {
        Self { horizon_policy: HorizonPolicy::Strict }
    }

    pub fn clip() -> Self {
        Self { horizon_policy: HorizonPolicy::Clip }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("window at t = {time} reaches {needed}, past the trace horizon {horizon}")]
    HorizonExceeded { time: f64, needed: f64, horizon: f64 },
    #[error("t = {0} is not a sample timestamp of the trace")]
    NonSampleTime(f64),
}

/// Per-timestamp verdicts. `None` marks samples whose verdict is undefined
/// under [`HorizonPolicy::Strict`].
pub type Verdicts = Vec<Option<bool>>;

pub(crate) fn check_variables(f: &Formula, trace: &Trace) -> Result<(), EvalError> {
    match f.variables().into_iter().find(|v| trace.signal(v).is_none()) {
        Some(missing) => Err(EvalError::UnknownVariable(missing.to_string())),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests;
