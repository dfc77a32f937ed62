//! Adapted processes: a random variable for every `t`, measurable at `t`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::SpaceError;
use crate::ext::ExtReal;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

pub type Generator = Arc<dyn Fn(usize) -> RandomVariable + Send + Sync>;

/// How an explicit process continues past its last listed time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// `X_T = X_L` for `T > L`.
    Hold,
    /// `X_T = X_L + (T - L) (X_L - X_{L-1})`.
    Linear,
}

#[derive(Clone)]
pub enum AdaptedProcess {
    Explicit { values: Vec<RandomVariable>, tail: TailRule },
    Generated(Generator),
}

impl AdaptedProcess {
    pub fn explicit(values: Vec<RandomVariable>, tail: TailRule) -> Self {
        assert!(!values.is_empty(), "explicit process needs at least X_0");
        AdaptedProcess::Explicit { values, tail }
    }

    pub fn generated(f: impl Fn(usize) -> RandomVariable + Send + Sync + 'static) -> Self {
        AdaptedProcess::Generated(Arc::new(f))
    }

    pub fn at(&self, t: usize) -> RandomVariable {
        match self {
            AdaptedProcess::Generated(f) => f(t),
            AdaptedProcess::Explicit { values, tail } => {
                let last = values.len() - 1;
                if t <= last {
                    return values[t].clone();
                }
                match tail {
                    TailRule::Hold => values[last].clone(),
                    TailRule::Linear if last == 0 => values[0].clone(),
                    TailRule::Linear => {
                        let steps = ExtReal::new((t - last) as f64);
                        values[last].zip_map(&values[last - 1], |x, prev| x + steps * (x - prev))
                    }
                }
            }
        }
    }

    /// Number of explicitly listed times, if any.
    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            AdaptedProcess::Explicit { values, .. } => Some(values.len()),
            AdaptedProcess::Generated(_) => None,
        }
    }

    /// Checks lengths and `F_t`-measurability for `t = 0..=upto`.
    pub fn check_adapted(&self, space: &FilteredSpace, upto: usize) -> Result<(), SpaceError> {
        for t in 0..=upto {
            let x = self.at(t);
            space.check_len(&x)?;
            if !space.is_measurable(&x, t) {
                return Err(SpaceError::NotMeasurable { t });
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AdaptedProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdaptedProcess::Explicit { values, tail } => {
                f.debug_struct("Explicit").field("len", &values.len()).field("tail", tail).finish()
            }
            AdaptedProcess::Generated(_) => f.write_str("Generated(..)"),
        }
    }
}
