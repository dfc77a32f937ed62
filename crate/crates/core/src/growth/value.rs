use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ValueError;
use crate::ext::ExtReal;
use crate::process::{AdaptedProcess, TailRule};
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

/// How an explicit value process continues past its last listed time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueTail {
    /// `V_T = V_L`.
    #[default]
    Hold,
    /// `V_T = V_L (V_L / V_{L-1})^{T-L}`.
    Geometric,
}

/// A nonnegative adapted process absorbed at zero.
///
/// Values are kept as `ln V_t` so that horizons in the thousands with
/// exponential growth stay representable; `V_t = 0` is `ln V_t = -inf`.
/// Multiplications applied through [`scale_at`](Self::scale_at) are kept
/// apart from the raw process, so that a scaler applied at or before `t`
/// cancels exactly in `ln(V_T / V_t)`.
#[derive(Clone, Debug)]
pub struct ValueProcess {
    space: Arc<FilteredSpace>,
    log: AdaptedProcess,
    scalings: Vec<(usize, RandomVariable)>,
    absorption: Vec<Option<usize>>,
    v_tilde: bool,
    checked_upto: usize,
    max_horizon: Option<usize>,
}

impl ValueProcess {
    /// Validates raw values `V_0, ..., V_L` given per time and atom.
    pub fn from_values(
        space: Arc<FilteredSpace>,
        values: Vec<RandomVariable>,
        tail: ValueTail,
    ) -> Result<Self, ValueError> {
        if values.is_empty() {
            return Err(ValueError::Empty);
        }
        let mut logs = Vec::with_capacity(values.len());
        for (t, v) in values.iter().enumerate() {
            space.check_len(v)?;
            for (atom, x) in v.iter().enumerate() {
                if !x.is_finite() {
                    return Err(ValueError::NonFinite { t, atom, value: x.get() });
                }
                if x.get() < 0.0 {
                    return Err(ValueError::NegativeValue { t, atom, value: x.get() });
                }
            }
            logs.push(v.map(ExtReal::ln));
        }
        let upto = logs.len();
        let rule = match tail {
            ValueTail::Hold => TailRule::Hold,
            ValueTail::Geometric => TailRule::Linear,
        };
        // one step past the listed range covers the tail rule
        Self::from_log(space, AdaptedProcess::explicit(logs, rule), upto)
    }

    /// Wraps a process of `ln V_t`, validating `t = 0..=check_upto`.
    pub fn from_log(space: Arc<FilteredSpace>, log: AdaptedProcess, check_upto: usize) -> Result<Self, ValueError> {
        let n = space.atom_count();
        let mut absorption = vec![None; n];
        for t in 0..=check_upto {
            let x = log.at(t);
            space.check_len(&x)?;
            if !space.is_measurable(&x, t) {
                return Err(ValueError::NotMeasurable { t });
            }
            for (atom, v) in x.iter().enumerate() {
                if v.is_pos_inf() {
                    return Err(ValueError::NonFinite { t, atom, value: f64::INFINITY });
                }
                match (absorption[atom], v.is_neg_inf()) {
                    (None, true) => absorption[atom] = Some(t),
                    (Some(_), false) => return Err(ValueError::AbsorptionViolation { t, atom }),
                    _ => {}
                }
            }
        }
        let v_tilde = absorption.iter().all(Option::is_none);
        Ok(ValueProcess {
            space,
            log,
            scalings: Vec::new(),
            absorption,
            v_tilde,
            checked_upto: check_upto,
            max_horizon: None,
        })
    }

    /// Caps the horizons this process may be evaluated at.
    pub fn with_max_horizon(mut self, max: usize) -> Self {
        self.max_horizon = Some(max);
        self
    }

    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FilteredSpace> {
        &self.space
    }

    /// Strictly positive over the validated range.
    pub fn v_tilde(&self) -> bool {
        self.v_tilde
    }

    /// First time each atom hits zero, within the validated range.
    pub fn absorption_time(&self) -> &[Option<usize>] {
        &self.absorption
    }

    pub fn checked_upto(&self) -> usize {
        self.checked_upto
    }

    pub fn max_horizon(&self) -> Option<usize> {
        self.max_horizon
    }

    fn check_horizon(&self, t: usize) -> Result<(), ValueError> {
        match self.max_horizon {
            Some(max) if t > max => Err(ValueError::HorizonOutOfRange { horizon: t, max }),
            _ => Ok(()),
        }
    }

    /// `ln V_t`.
    pub fn log_value(&self, t: usize) -> Result<RandomVariable, ValueError> {
        self.check_horizon(t)?;
        let mut x = self.log.at(t);
        for (tk, lm) in &self.scalings {
            if *tk <= t {
                x = x.add(lm);
            }
        }
        Ok(x)
    }

    pub fn value(&self, t: usize) -> Result<RandomVariable, ValueError> {
        Ok(self.log_value(t)?.map(ExtReal::exp))
    }

    /// `ln(V_T / V_t)` for `T >= t`, with `ln(0 / v) = -inf`.
    pub fn log_ratio(&self, big_t: usize, t: usize) -> Result<RandomVariable, ValueError> {
        assert!(big_t >= t, "log_ratio needs T >= t");
        self.check_horizon(big_t)?;
        let raw_t = self.log.at(t);
        let raw_big = self.log.at(big_t);
        let out = (0..raw_big.len())
            .map(|a| {
                let dead =
                    raw_big[a].is_neg_inf() || self.scalings.iter().any(|(tk, lm)| *tk <= big_t && lm[a].is_neg_inf());
                if dead {
                    return ExtReal::NEG_INF;
                }
                let mut r = raw_big[a] - raw_t[a];
                for (tk, lm) in &self.scalings {
                    if t < *tk && *tk <= big_t {
                        r = r + lm[a];
                    }
                }
                r
            })
            .collect();
        Ok(out)
    }

    /// `m ._t V`: multiplies `V_s` for every `s >= t` by the `F_t`-measurable
    /// `m > 0`. The result stays strictly positive when `V` is.
    pub fn scale_at(&self, t: usize, m: &RandomVariable) -> Result<Self, ValueError> {
        if m.iter().any(|v| !(v.is_finite() && v.get() > 0.0)) {
            return Err(ValueError::NonPositiveScaler);
        }
        self.multiply_at(t, m)
    }

    /// Like [`scale_at`](Self::scale_at) but also accepts zeros, which kill
    /// the process from `t` on (used for `I_A ._t V`).
    pub fn multiply_at(&self, t: usize, m: &RandomVariable) -> Result<Self, ValueError> {
        self.space.check_len(m)?;
        if !self.space.is_measurable(m, t) {
            return Err(ValueError::NotMeasurable { t });
        }
        if m.iter().any(|v| !v.is_finite() || v.get() < 0.0) {
            return Err(ValueError::NonPositiveScaler);
        }
        let mut out = self.clone();
        let lm = m.map(ExtReal::ln);
        for (a, v) in lm.iter().enumerate() {
            if v.is_neg_inf() {
                let tau = out.absorption[a].map_or(t, |s| s.min(t));
                out.absorption[a] = Some(tau);
                out.v_tilde = false;
            }
        }
        out.scalings.push((t, lm));
        Ok(out)
    }
}
