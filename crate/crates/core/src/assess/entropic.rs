use crate::error::AssessError;
use crate::ext::ExtReal;
use crate::numeric::log_mean_exp;
use crate::space::{cell_expectation, FilteredSpace};
use crate::variable::RandomVariable;

use super::{Assessor, AssessorFlags};

/// Dynamic monetary entropic utility
/// `mu_t(X) = (1/gamma) ln E[exp(gamma X) | F_t]`, and `E[X | F_t]` at `gamma = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entropic {
    gamma: f64,
}

impl Entropic {
    pub fn new(gamma: f64) -> Result<Self, AssessError> {
        if !gamma.is_finite() {
            return Err(AssessError::InvalidParameter(format!("gamma = {gamma}")));
        }
        Ok(Entropic { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Assessor for Entropic {
    fn label(&self) -> String {
        format!("entropic({})", self.gamma)
    }

    fn flags(&self) -> AssessorFlags {
        AssessorFlags { cash_additive: true, bi_lipschitz: self.gamma == 0.0, satisfies_enough1: true }
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        let g = self.gamma;
        Ok(space.apply_cells(t, x, |p, v| entropic_cell(g, p, v)))
    }

    fn extends_directly(&self) -> bool {
        true
    }

    fn entropic_gamma(&self) -> Option<f64> {
        Some(self.gamma)
    }
}

/// Entropic utility of one cell.
///
/// Infinite inputs follow the extended-real rules: an atom with
/// `gamma * x = +inf` makes the moment infinite, atoms with
/// `gamma * x = -inf` contribute `exp(-inf) = 0`.
pub fn entropic_cell(gamma: f64, probs: &[f64], values: &[ExtReal]) -> ExtReal {
    if gamma == 0.0 {
        return cell_expectation(probs, values);
    }
    let mut lo = ExtReal::POS_INF;
    let mut hi = ExtReal::NEG_INF;
    let mut kept_p = Vec::with_capacity(values.len());
    let mut kept_y = Vec::with_capacity(values.len());
    let mut dropped = false;
    for (&p, &v) in probs.iter().zip(values) {
        lo = lo.min(v);
        hi = hi.max(v);
        let y = v.scale(gamma);
        if y.is_pos_inf() {
            // ln E[...] = +inf
            return ExtReal::POS_INF.div_scalar(gamma);
        }
        if y.is_neg_inf() {
            dropped = true;
        } else {
            kept_p.push(p);
            kept_y.push(y.get());
        }
    }
    if kept_y.is_empty() {
        return ExtReal::NEG_INF.div_scalar(gamma);
    }
    let mut log_moment = log_mean_exp(&kept_p, &kept_y);
    if dropped {
        let kept: f64 = kept_p.iter().sum();
        let total: f64 = probs.iter().sum();
        log_moment += (kept / total).ln();
    }
    ExtReal::new(log_moment / gamma).max(lo).min(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> FilteredSpace {
        FilteredSpace::dyadic(1).unwrap()
    }

    #[test]
    fn gamma_zero_is_expectation() {
        let x = RandomVariable::from_f64s(&[1.0, 3.0]);
        let v = Entropic::new(0.0).unwrap().evaluate(&space(), 0, &x).unwrap();
        assert_eq!(v, RandomVariable::from_f64s(&[2.0, 2.0]));
    }

    #[test]
    fn constants_are_fixed_points() {
        let x = RandomVariable::from_f64s(&[0.37, 0.37]);
        for g in [-3.0, -0.5, 1e-9, 2.0, 40.0] {
            let v = Entropic::new(g).unwrap().evaluate(&space(), 0, &x).unwrap();
            assert_eq!(v, x, "gamma {g}");
        }
    }

    #[test]
    fn ln_two_example() {
        let x = RandomVariable::from_f64s(&[0.0, 3f64.ln()]);
        let v = Entropic::new(1.0).unwrap().evaluate(&space(), 0, &x).unwrap();
        assert!((v[0].get() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn neg_inf_atoms() {
        let x = RandomVariable::new(vec![ExtReal::NEG_INF, ExtReal::new(1.0)]);
        // gamma > 0 drops the atom: ln(0.5 e^1) = 1 - ln 2
        let v = Entropic::new(1.0).unwrap().evaluate(&space(), 0, &x).unwrap();
        assert!((v[0].get() - (1.0 - 2f64.ln())).abs() < 1e-15);
        let v = Entropic::new(-1.0).unwrap().evaluate(&space(), 0, &x).unwrap();
        assert_eq!(v[0], ExtReal::NEG_INF);
        let all = RandomVariable::constant(2, ExtReal::NEG_INF);
        assert_eq!(Entropic::new(2.0).unwrap().evaluate(&space(), 0, &all).unwrap()[1], ExtReal::NEG_INF);
    }

    #[test]
    fn pos_inf_atoms() {
        let x = RandomVariable::new(vec![ExtReal::POS_INF, ExtReal::new(1.0)]);
        assert_eq!(Entropic::new(1.0).unwrap().evaluate(&space(), 0, &x).unwrap()[0], ExtReal::POS_INF);
        // gamma < 0: exp(-inf) = 0, ln(0.5 e^-1) / -1 = 1 + ln 2
        let v = Entropic::new(-1.0).unwrap().evaluate(&space(), 0, &x).unwrap();
        assert!((v[0].get() - (1.0 + 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_gamma() {
        assert!(Entropic::new(f64::NAN).is_err());
        assert!(Entropic::new(f64::INFINITY).is_err());
    }
}
