use crate::error::AssessError;
use crate::ext::ExtReal;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

use super::{Assessor, AssessorFlags};

/// Negative conditional average value at risk,
/// `-AV@R_alpha(X | F_t) = (1/alpha) int_0^alpha q_u(X | F_t) du`
/// with `q_u` the lower conditional quantile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegAvar {
    alpha: f64,
}

impl NegAvar {
    pub fn new(alpha: f64) -> Result<Self, AssessError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(AssessError::InvalidParameter(format!("alpha = {alpha} outside (0, 1]")));
        }
        Ok(NegAvar { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Assessor for NegAvar {
    fn label(&self) -> String {
        format!("neg_avar({})", self.alpha)
    }

    fn flags(&self) -> AssessorFlags {
        AssessorFlags { cash_additive: true, bi_lipschitz: false, satisfies_enough1: true }
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        let alpha = self.alpha;
        Ok(space.apply_cells(t, x, |p, v| neg_avar_cell(alpha, p, v)))
    }

    fn extends_directly(&self) -> bool {
        true
    }
}

/// Average of the lowest `alpha` share of the cell's probability mass; the
/// atom straddling the `alpha` level contributes its fractional mass.
pub fn neg_avar_cell(alpha: f64, probs: &[f64], values: &[ExtReal]) -> ExtReal {
    if values.iter().any(|v| v.is_neg_inf()) {
        return ExtReal::NEG_INF;
    }
    let total: f64 = probs.iter().sum();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]));

    let budget = alpha * total;
    let mut remaining = budget;
    let mut acc = ExtReal::ZERO;
    for &i in &order {
        if remaining <= 0.0 {
            break;
        }
        let w = probs[i].min(remaining);
        remaining -= w;
        acc = acc + values[i].scale(w);
    }
    let lo = values[order[0]];
    let hi = values[order[order.len() - 1]];
    acc.div_scalar(budget).max(lo).min(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_one_is_the_mean() {
        let s = FilteredSpace::dyadic(2).unwrap();
        let x = RandomVariable::from_f64s(&[1.0, -2.0, 5.0, 0.5]);
        let a = NegAvar::new(1.0).unwrap().evaluate(&s, 1, &x).unwrap();
        assert_eq!(a, s.cond_expect(&x, 1));
    }

    #[test]
    fn lowest_half() {
        let s = FilteredSpace::dyadic(1).unwrap();
        let x = RandomVariable::from_f64s(&[3.0, 1.0]);
        assert_eq!(NegAvar::new(0.5).unwrap().evaluate(&s, 0, &x).unwrap()[0].get(), 1.0);
    }

    #[test]
    fn fractional_atom() {
        // lowest 0.3 of mass of uniform {1, 3}: all from the atom valued 1
        // lowest 0.75: 0.5 * 1 + 0.25 * 3 over 0.75
        let p = [0.5, 0.5];
        let v = [ExtReal::new(3.0), ExtReal::new(1.0)];
        assert!((neg_avar_cell(0.3, &p, &v).get() - 1.0).abs() < 1e-15);
        assert!((neg_avar_cell(0.75, &p, &v).get() - (0.5 + 0.75) / 0.75).abs() < 1e-15);
    }

    #[test]
    fn constants_and_infinities() {
        let p = [0.2, 0.3, 0.5];
        let c = [ExtReal::new(0.7); 3];
        assert_eq!(neg_avar_cell(0.05, &p, &c).get(), 0.7);
        let v = [ExtReal::new(1.0), ExtReal::NEG_INF, ExtReal::new(2.0)];
        assert_eq!(neg_avar_cell(0.5, &p, &v), ExtReal::NEG_INF);
        let v = [ExtReal::new(1.0), ExtReal::POS_INF, ExtReal::new(2.0)];
        assert_eq!(neg_avar_cell(0.5, &p, &v).get(), (0.2 + 0.3 * 2.0) / 0.5);
        assert_eq!(neg_avar_cell(1.0, &p, &v), ExtReal::POS_INF);
    }

    #[test]
    fn alpha_range() {
        assert!(NegAvar::new(0.0).is_err());
        assert!(NegAvar::new(1.01).is_err());
        assert!(NegAvar::new(f64::NAN).is_err());
    }
}
