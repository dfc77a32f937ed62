use crate::error::AssessError;
use crate::ext::ExtReal;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

use super::{Assessor, AssessorFlags, SharedAssessor};

pub const HAT_MAX_DOUBLINGS: u32 = 60;
pub const HAT_TOL: f64 = 1e-10;

/// `mu_t(X^+)`: losses are replaced by zero before assessing.
#[derive(Clone, Debug)]
pub struct RiskSeeking {
    base: SharedAssessor,
}

impl RiskSeeking {
    pub fn new(base: SharedAssessor) -> Self {
        RiskSeeking { base }
    }

    pub fn base(&self) -> &SharedAssessor {
        &self.base
    }
}

impl Assessor for RiskSeeking {
    fn label(&self) -> String {
        format!("risk_seeking({})", self.base.label())
    }

    fn flags(&self) -> AssessorFlags {
        let base = self.base.flags();
        AssessorFlags { cash_additive: false, bi_lipschitz: base.bi_lipschitz, satisfies_enough1: base.cash_additive }
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        self.base.evaluate(space, t, &x.pos_part())
    }

    // X^+ never takes the value -inf
    fn extends_directly(&self) -> bool {
        true
    }
}

/// Result of the truncation limit `liminf_n mu_t(X v -n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatOutcome {
    pub value: RandomVariable,
    /// Per atom: whether the doubling schedule settled.
    pub converged: Vec<bool>,
    /// Whether the value came from direct evaluation.
    pub direct: bool,
}

impl HatOutcome {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// `hat mu_t(X)`. Assessors that extend directly, and inputs without `-inf`
/// entries, are evaluated once; everything else goes through [`hat_schedule`].
pub fn hat_eval(
    base: &dyn Assessor,
    space: &FilteredSpace,
    t: usize,
    x: &RandomVariable,
) -> Result<HatOutcome, AssessError> {
    if base.extends_directly() || !x.iter().any(ExtReal::is_neg_inf) {
        let value = base.evaluate(space, t, x)?;
        return Ok(HatOutcome { converged: vec![true; value.len()], value, direct: true });
    }
    hat_schedule(base, space, t, x)
}

/// Evaluates `mu_t(X v -n)` for `n = 2^0, ..., 2^60`.
///
/// An atom converges when the last two evaluations agree within
/// [`HAT_TOL`]. A tail that keeps falling with growing steps is read as
/// divergence to `-inf`. Otherwise the minimum over the last quarter of the
/// schedule is returned, flagged as not converged.
pub fn hat_schedule(
    base: &dyn Assessor,
    space: &FilteredSpace,
    t: usize,
    x: &RandomVariable,
) -> Result<HatOutcome, AssessError> {
    let mut history: Vec<RandomVariable> = Vec::with_capacity(HAT_MAX_DOUBLINGS as usize + 1);
    for k in 0..=HAT_MAX_DOUBLINGS {
        let n = (1u64 << k) as f64;
        history.push(base.evaluate(space, t, &x.floor_at(n))?);
    }
    let last = history.len() - 1;
    let tail_start = last - last / 4;
    let mut value = Vec::with_capacity(x.len());
    let mut converged = Vec::with_capacity(x.len());
    for a in 0..x.len() {
        let (v2, v1, v0) = (history[last - 2][a], history[last - 1][a], history[last][a]);
        if v0.distance(v1) <= HAT_TOL {
            value.push(v0);
            converged.push(true);
            continue;
        }
        if let (Some(v2), Some(v1), Some(v0)) = (v2.finite(), v1.finite(), v0.finite()) {
            let (d1, d0) = (v1 - v2, v0 - v1);
            if d1 < 0.0 && d0 < 0.0 && d0 <= 1.5 * d1 {
                value.push(ExtReal::NEG_INF);
                converged.push(true);
                continue;
            }
        }
        let inf = history[tail_start..].iter().map(|h| h[a]).min().expect("nonempty tail");
        value.push(inf);
        converged.push(false);
    }
    Ok(HatOutcome { value: RandomVariable::new(value), converged, direct: false })
}

/// The hat-extension as an assessor in its own right.
#[derive(Clone, Debug)]
pub struct HatExtension {
    base: SharedAssessor,
}

impl HatExtension {
    pub fn new(base: SharedAssessor) -> Self {
        HatExtension { base }
    }
}

impl Assessor for HatExtension {
    fn label(&self) -> String {
        format!("hat({})", self.base.label())
    }

    fn flags(&self) -> AssessorFlags {
        self.base.flags()
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        Ok(hat_eval(self.base.as_ref(), space, t, x)?.value)
    }

    fn extends_directly(&self) -> bool {
        true
    }

    fn entropic_gamma(&self) -> Option<f64> {
        self.base.entropic_gamma()
    }
}

/// `esssup(X | F_t) + essinf(X | F_t)`: local and monotone but without the
/// Fatou property, so its hat-extension differs from it on `(+inf, -inf)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SupPlusInf;

impl Assessor for SupPlusInf {
    fn label(&self) -> String {
        "sup_plus_inf".into()
    }

    fn flags(&self) -> AssessorFlags {
        AssessorFlags::default()
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        Ok(space.apply_cells(t, x, |_, v| {
            let hi = v.iter().copied().max().unwrap_or(ExtReal::NEG_INF);
            let lo = v.iter().copied().min().unwrap_or(ExtReal::POS_INF);
            hi + lo
        }))
    }
}
