use std::fmt;
use std::sync::Arc;

use crate::error::AssessError;
use crate::ext::ExtReal;
use crate::space::{cell_expectation, FilteredSpace};
use crate::variable::RandomVariable;

use super::{Assessor, AssessorFlags};

pub const INVERSION_TOL: f64 = 1e-10;
pub const BRACKET_DOUBLINGS: usize = 200;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A strictly increasing, continuous utility `U` on the extended line.
///
/// `forward` is only called on finite arguments; `range` holds
/// `(U(-inf), U(+inf))`.
#[derive(Clone)]
pub struct UtilitySpec {
    name: String,
    forward: ScalarFn,
    inverse: Option<ScalarFn>,
    range: (f64, f64),
    lipschitz: Option<(f64, f64)>,
    cash_additive: bool,
}

impl UtilitySpec {
    /// A user-supplied utility. Without `inverse` the certainty equivalent is
    /// solved by bisection.
    pub fn custom(
        name: impl Into<String>,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: Option<ScalarFn>,
        range: (f64, f64),
        lipschitz: Option<(f64, f64)>,
    ) -> Self {
        UtilitySpec { name: name.into(), forward: Arc::new(forward), inverse, range, lipschitz, cash_additive: false }
    }

    pub fn identity() -> Self {
        UtilitySpec {
            name: "identity".into(),
            forward: Arc::new(|x| x),
            inverse: Some(Arc::new(|y| y)),
            range: (f64::NEG_INFINITY, f64::INFINITY),
            lipschitz: Some((1.0, 1.0)),
            cash_additive: true,
        }
    }

    /// `U(x) = e^{gamma x}` for `gamma > 0`, `-e^{gamma x}` for `gamma < 0`.
    /// Its certainty equivalent is the entropic utility.
    pub fn exponential(gamma: f64) -> Result<Self, AssessError> {
        if !gamma.is_finite() {
            return Err(AssessError::InvalidParameter(format!("exponential utility gamma = {gamma}")));
        }
        if gamma == 0.0 {
            return Ok(UtilitySpec { name: "exp(0)".into(), ..Self::identity() });
        }
        let (forward, inverse, range): (ScalarFn, ScalarFn, _) = if gamma > 0.0 {
            (Arc::new(move |x: f64| (gamma * x).exp()), Arc::new(move |y: f64| y.ln() / gamma), (0.0, f64::INFINITY))
        } else {
            (
                Arc::new(move |x: f64| -(gamma * x).exp()),
                Arc::new(move |y: f64| (-y).ln() / gamma),
                (f64::NEG_INFINITY, 0.0),
            )
        };
        Ok(UtilitySpec {
            name: format!("exp({gamma})"),
            forward,
            inverse: Some(inverse),
            range,
            lipschitz: None,
            cash_additive: true,
        })
    }

    /// `U(x) = sign(x) |x|^p`, `0 < p <= 1`. Not bi-Lipschitz for `p < 1`.
    pub fn power(p: f64) -> Result<Self, AssessError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(AssessError::InvalidParameter(format!("power utility p = {p} outside (0, 1]")));
        }
        Ok(UtilitySpec {
            name: format!("power({p})"),
            forward: Arc::new(move |x: f64| x.signum() * x.abs().powf(p)),
            inverse: Some(Arc::new(move |y: f64| y.signum() * y.abs().powf(1.0 / p))),
            range: (f64::NEG_INFINITY, f64::INFINITY),
            lipschitz: (p == 1.0).then_some((1.0, 1.0)),
            cash_additive: p == 1.0,
        })
    }

    /// `U(x) = x + a sin(x)`, `0 <= a < 1`: bi-Lipschitz with constants
    /// `(1 + a, 1 / (1 - a))` and no closed-form inverse.
    pub fn wavy(a: f64) -> Result<Self, AssessError> {
        if !(0.0..1.0).contains(&a) {
            return Err(AssessError::InvalidParameter(format!("wavy utility a = {a} outside [0, 1)")));
        }
        Ok(UtilitySpec {
            name: format!("wavy({a})"),
            forward: Arc::new(move |x: f64| x + a * x.sin()),
            inverse: None,
            range: (f64::NEG_INFINITY, f64::INFINITY),
            lipschitz: Some((1.0 + a, 1.0 / (1.0 - a))),
            cash_additive: a == 0.0,
        })
    }

    /// Looks up a utility by its config name.
    pub fn named(name: &str, param: Option<f64>) -> Result<Self, AssessError> {
        let need = || param.ok_or_else(|| AssessError::InvalidParameter(format!("utility {name} needs a param")));
        match name {
            "identity" | "linear" => Ok(Self::identity()),
            "exp" | "exponential" => Self::exponential(need()?),
            "power" => Self::power(param.unwrap_or(0.5)),
            "wavy" => Self::wavy(param.unwrap_or(0.5)),
            other => Err(AssessError::InvalidParameter(format!("unknown utility {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz(&self) -> Option<(f64, f64)> {
        self.lipschitz
    }

    pub fn has_closed_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn forward(&self, x: ExtReal) -> ExtReal {
        if x.is_neg_inf() {
            ExtReal::new(self.range.0)
        } else if x.is_pos_inf() {
            ExtReal::new(self.range.1)
        } else {
            ExtReal::new((self.forward)(x.get()))
        }
    }

    /// `U^{-1}(y)`. `hint` is a finite interval to start the bracket from,
    /// usually the cell's value range.
    pub fn inverse(&self, y: ExtReal, hint: (f64, f64)) -> Result<ExtReal, AssessError> {
        let (lo_u, hi_u) = self.range;
        if y.get() <= lo_u {
            return Ok(ExtReal::NEG_INF);
        }
        if y.get() >= hi_u {
            return Ok(ExtReal::POS_INF);
        }
        let y = y.get();
        if let Some(inv) = &self.inverse {
            return Ok(ExtReal::new(inv(y)));
        }
        self.bisect(y, hint).map(ExtReal::new)
    }

    fn bisect(&self, y: f64, hint: (f64, f64)) -> Result<f64, AssessError> {
        let u = &self.forward;
        let fail = || AssessError::InversionFailure { utility: self.name.clone(), level: y };
        let (mut lo, mut hi) = hint;
        let mut width = (hi - lo).max(1.0);
        let mut budget = BRACKET_DOUBLINGS;
        while u(lo) > y {
            if budget == 0 || !lo.is_finite() {
                return Err(fail());
            }
            lo -= width;
            width *= 2.0;
            budget -= 1;
        }
        width = (hi - lo).max(1.0);
        while u(hi) < y {
            if budget == 0 || !hi.is_finite() {
                return Err(fail());
            }
            hi += width;
            width *= 2.0;
            budget -= 1;
        }
        loop {
            let mid = lo + 0.5 * (hi - lo);
            if hi - lo <= INVERSION_TOL || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let v = u(mid);
            if v.is_nan() {
                return Err(fail());
            }
            if v < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

impl fmt::Debug for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UtilitySpec")
            .field("name", &self.name)
            .field("closed_inverse", &self.inverse.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

/// Dynamic certainty equivalent `U^{-1}(E[U(X) | F_t])`.
#[derive(Clone, Debug)]
pub struct CertaintyEquivalent {
    utility: UtilitySpec,
}

impl CertaintyEquivalent {
    pub fn new(utility: UtilitySpec) -> Self {
        CertaintyEquivalent { utility }
    }

    pub fn utility(&self) -> &UtilitySpec {
        &self.utility
    }

    fn cell(&self, probs: &[f64], values: &[ExtReal]) -> Result<ExtReal, AssessError> {
        let lo = values.iter().copied().min().unwrap_or(ExtReal::NEG_INF);
        let hi = values.iter().copied().max().unwrap_or(ExtReal::POS_INF);
        let us: Vec<ExtReal> = values.iter().map(|&v| self.utility.forward(v)).collect();
        let level = cell_expectation(probs, &us);
        let finite: Vec<f64> = values.iter().filter_map(|v| v.finite()).collect();
        let hint = if finite.is_empty() {
            (-1.0, 1.0)
        } else {
            (
                finite.iter().copied().fold(f64::INFINITY, f64::min),
                finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        };
        Ok(self.utility.inverse(level, hint)?.max(lo).min(hi))
    }
}

impl Assessor for CertaintyEquivalent {
    fn label(&self) -> String {
        format!("ce({})", self.utility.name)
    }

    fn flags(&self) -> AssessorFlags {
        let bi_lipschitz = self.utility.lipschitz.is_some();
        AssessorFlags {
            cash_additive: self.utility.cash_additive,
            bi_lipschitz,
            satisfies_enough1: self.utility.cash_additive || bi_lipschitz,
        }
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        space.try_apply_cells(t, x, |p, v| self.cell(p, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assess::Entropic;

    fn two() -> FilteredSpace {
        FilteredSpace::dyadic(1).unwrap()
    }

    #[test]
    fn identity_is_conditional_expectation() {
        let s = FilteredSpace::dyadic(3).unwrap();
        let x = RandomVariable::from_f64s(&[0.1, -2.0, 7.0, 3.5, 0.0, 1.0, -1.0, 4.25]);
        let ce = CertaintyEquivalent::new(UtilitySpec::identity());
        for t in 0..=3 {
            assert_eq!(ce.evaluate(&s, t, &x).unwrap(), s.cond_expect(&x, t));
        }
    }

    #[test]
    fn exponential_matches_entropic() {
        let x = RandomVariable::from_f64s(&[0.0, 3f64.ln()]);
        let ce = CertaintyEquivalent::new(UtilitySpec::exponential(1.0).unwrap());
        let v = ce.evaluate(&two(), 0, &x).unwrap();
        assert!((v[0].get() - 2f64.ln()).abs() < 1e-12);

        let s = FilteredSpace::dyadic(3).unwrap();
        let x = RandomVariable::from_f64s(&[0.3, -1.2, 2.0, 0.0, 5.0, -4.0, 1.5, 0.25]);
        for g in [-2.0, -0.3, 0.7, 3.0] {
            let ce = CertaintyEquivalent::new(UtilitySpec::exponential(g).unwrap());
            let en = Entropic::new(g).unwrap();
            for t in 0..3 {
                let a = ce.evaluate(&s, t, &x).unwrap();
                let b = en.evaluate(&s, t, &x).unwrap();
                for (u, w) in a.iter().zip(b.iter()) {
                    assert!(u.distance(w) < 1e-12, "gamma {g} t {t}: {u} vs {w}");
                }
            }
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let x = RandomVariable::from_f64s(&[1.7, 1.7]);
        for u in [
            UtilitySpec::identity(),
            UtilitySpec::exponential(-2.0).unwrap(),
            UtilitySpec::power(0.5).unwrap(),
            UtilitySpec::wavy(0.7).unwrap(),
        ] {
            let ce = CertaintyEquivalent::new(u);
            assert_eq!(ce.evaluate(&two(), 0, &x).unwrap(), x);
        }
    }

    #[test]
    fn numeric_inverse_round_trip() {
        let u = UtilitySpec::wavy(0.9).unwrap();
        for y in [-1e6, -30.0, -1.0, 0.0, 0.3, 12.5, 4e5] {
            let x = u.inverse(ExtReal::new(y), (0.0, 0.0)).unwrap().get();
            let back = u.forward(ExtReal::new(x)).get();
            assert!((back - y).abs() <= 1e-9 * y.abs().max(1.0), "{y} -> {x} -> {back}");
        }
    }

    #[test]
    fn wavy_ce_solves_the_equation() {
        let x = RandomVariable::from_f64s(&[-3.0, 8.0]);
        let u = UtilitySpec::wavy(0.5).unwrap();
        let ce = CertaintyEquivalent::new(u.clone());
        let v = ce.evaluate(&two(), 0, &x).unwrap()[0];
        let target = 0.5 * (u.forward(ExtReal::new(-3.0)).get() + u.forward(ExtReal::new(8.0)).get());
        assert!((u.forward(v).get() - target).abs() < 1e-9);
    }

    #[test]
    fn infinite_inputs() {
        let x = RandomVariable::new(vec![ExtReal::NEG_INF, ExtReal::new(1.0)]);
        let ce = CertaintyEquivalent::new(UtilitySpec::power(0.5).unwrap());
        assert_eq!(ce.evaluate(&two(), 0, &x).unwrap()[0], ExtReal::NEG_INF);
        // U(-inf) = 0 for the increasing exponential, so the atom drops out
        let ce = CertaintyEquivalent::new(UtilitySpec::exponential(1.0).unwrap());
        let v = ce.evaluate(&two(), 0, &x).unwrap()[0].get();
        assert!((v - (1.0 - 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn broken_utility_reports_inversion_failure() {
        // bounded above, so large levels cannot be bracketed
        let u = UtilitySpec::custom("atan", f64::atan, None, (f64::NEG_INFINITY, f64::INFINITY), None);
        let err = u.inverse(ExtReal::new(5.0), (0.0, 1.0)).unwrap_err();
        assert!(matches!(err, AssessError::InversionFailure { .. }));
    }

    #[test]
    fn flags() {
        let f = CertaintyEquivalent::new(UtilitySpec::exponential(1.0).unwrap()).flags();
        assert!(f.cash_additive && !f.bi_lipschitz && f.satisfies_enough1);
        let f = CertaintyEquivalent::new(UtilitySpec::power(0.5).unwrap()).flags();
        assert!(!f.cash_additive && !f.bi_lipschitz && !f.satisfies_enough1);
        let f = CertaintyEquivalent::new(UtilitySpec::wavy(0.5).unwrap()).flags();
        assert!(!f.cash_additive && f.bi_lipschitz && f.satisfies_enough1);
        assert!(UtilitySpec::named("exp", None).is_err());
        assert!(UtilitySpec::named("power", Some(2.0)).is_err());
    }
}
