//! Conditional assessment families `{mu_t}`.
//!
//! Every assessor maps a random variable to an `F_t`-measurable one. The
//! built-ins evaluate cell by cell, so they are local by construction; the
//! property lab checks locality and monotonicity anyway, since the flags an
//! assessor declares are claims, not guarantees.

mod avar;
mod certainty;
mod entropic;
mod wrappers;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::AssessError;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

pub use avar::{neg_avar_cell, NegAvar};
pub use certainty::{CertaintyEquivalent, UtilitySpec};
pub use entropic::{entropic_cell, Entropic};
pub use wrappers::{
    hat_eval, hat_schedule, HatExtension, HatOutcome, RiskSeeking, SupPlusInf, HAT_MAX_DOUBLINGS, HAT_TOL,
};

/// Properties an assessor claims about itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessorFlags {
    pub cash_additive: bool,
    pub bi_lipschitz: bool,
    /// Normalizing by `V_t` does not change the limit growth index.
    pub satisfies_enough1: bool,
}

pub trait Assessor: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    fn flags(&self) -> AssessorFlags;

    /// `mu_t(X)`, constant on the cells of `F_t`.
    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError>;

    /// True when `evaluate` applied to `-inf`-valued inputs already agrees
    /// with the truncation limit `lim_n mu_t(X v -n)`.
    fn extends_directly(&self) -> bool {
        false
    }

    /// Entropic parameter, if this is an entropic assessor.
    fn entropic_gamma(&self) -> Option<f64> {
        None
    }
}

pub type SharedAssessor = Arc<dyn Assessor>;

/// Serializable description of an assessor, as used in config files and on
/// the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssessorConfig {
    Entropic {
        gamma: f64,
    },
    NegAvar {
        alpha: f64,
    },
    #[serde(rename = "ce")]
    CertaintyEquivalent {
        utility: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
    },
    RiskSeeking {
        base: Box<AssessorConfig>,
    },
    Hat {
        base: Box<AssessorConfig>,
    },
    SupPlusInf,
}

impl AssessorConfig {
    pub fn build(&self) -> Result<SharedAssessor, AssessError> {
        Ok(match self {
            AssessorConfig::Entropic { gamma } => Arc::new(Entropic::new(*gamma)?),
            AssessorConfig::NegAvar { alpha } => Arc::new(NegAvar::new(*alpha)?),
            AssessorConfig::CertaintyEquivalent { utility, param } => {
                Arc::new(CertaintyEquivalent::new(UtilitySpec::named(utility, *param)?))
            }
            AssessorConfig::RiskSeeking { base } => Arc::new(RiskSeeking::new(base.build()?)),
            AssessorConfig::Hat { base } => Arc::new(HatExtension::new(base.build()?)),
            AssessorConfig::SupPlusInf => Arc::new(SupPlusInf),
        })
    }

    /// Parses either a JSON object or the colon shorthand
    /// (`entropic:-1`, `neg_avar:0.05`, `ce:power:0.5`, `risk_seeking:entropic:1`).
    pub fn parse(s: &str) -> Result<Self, AssessError> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| AssessError::InvalidParameter(e.to_string()));
        }
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let number = |r: Option<&str>| -> Result<f64, AssessError> {
            r.ok_or_else(|| AssessError::InvalidParameter(format!("{head} needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| AssessError::InvalidParameter(format!("{s}: {e}")))
        };
        match head {
            "entropic" => Ok(AssessorConfig::Entropic { gamma: number(rest)? }),
            "neg_avar" | "avar" => Ok(AssessorConfig::NegAvar { alpha: number(rest)? }),
            "ce" => {
                let rest = rest.ok_or_else(|| AssessError::InvalidParameter("ce needs a utility".into()))?;
                let (utility, param) = match rest.split_once(':') {
                    Some((u, p)) => (u, Some(number(Some(p))?)),
                    None => (rest, None),
                };
                Ok(AssessorConfig::CertaintyEquivalent { utility: utility.to_string(), param })
            }
            "risk_seeking" | "hat" => {
                let inner = rest.ok_or_else(|| AssessError::InvalidParameter(format!("{head} needs a base")))?;
                let base = Box::new(Self::parse(inner)?);
                Ok(if head == "hat" { AssessorConfig::Hat { base } } else { AssessorConfig::RiskSeeking { base } })
            }
            "sup_plus_inf" => Ok(AssessorConfig::SupPlusInf),
            other => Err(AssessError::InvalidParameter(format!("unknown assessor {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_fragments() {
        let c: AssessorConfig = serde_json::from_str(r#"{"kind":"entropic","gamma":-1.0}"#).unwrap();
        assert_eq!(c, AssessorConfig::Entropic { gamma: -1.0 });
        let c: AssessorConfig = serde_json::from_str(r#"{"kind":"neg_avar","alpha":0.05}"#).unwrap();
        assert_eq!(c, AssessorConfig::NegAvar { alpha: 0.05 });
        let c: AssessorConfig = serde_json::from_str(r#"{"kind":"ce","utility":"power","param":0.5}"#).unwrap();
        assert!(matches!(c, AssessorConfig::CertaintyEquivalent { .. }));
        let c: AssessorConfig =
            serde_json::from_str(r#"{"kind":"risk_seeking","base":{"kind":"entropic","gamma":1}}"#).unwrap();
        assert!(c.build().unwrap().label().starts_with("risk_seeking"));
    }

    #[test]
    fn shorthand() {
        assert_eq!(AssessorConfig::parse("entropic:-1").unwrap(), AssessorConfig::Entropic { gamma: -1.0 });
        assert_eq!(
            AssessorConfig::parse("ce:power:0.5").unwrap(),
            AssessorConfig::CertaintyEquivalent { utility: "power".into(), param: Some(0.5) }
        );
        assert_eq!(
            AssessorConfig::parse("risk_seeking:entropic:1").unwrap(),
            AssessorConfig::RiskSeeking { base: Box::new(AssessorConfig::Entropic { gamma: 1.0 }) }
        );
        assert!(AssessorConfig::parse("entropic").is_err());
        assert!(AssessorConfig::parse("bogus:1").is_err());
        assert!(AssessorConfig::parse("neg_avar:1.5").unwrap().build().is_err());
    }
}
