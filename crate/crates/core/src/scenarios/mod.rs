//! Reproductions of the worked example, the counterexamples and the remarks,
//! each paired with the outcome it should produce.
//!
//! Every computed number goes through the same estimators a user would call;
//! the expected side is a closed form or an inequality.

mod builders;
mod runs;

use serde::{Deserialize, Serialize};

use crate::exec::ExecMode;
use crate::ext::ExtReal;
use crate::growth::Quantization;

pub use builders::{dyadic_vhat, gamma0_a, gamma0_b, notacc, notrej, shrinking_set_len, split_process};
pub use runs::{run_scenario, SCENARIOS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    Approx {
        value: ExtReal,
        tol: f64,
    },
    AtLeast {
        bound: f64,
    },
    AtMost {
        bound: f64,
    },
    /// Reported for context only.
    Info,
}

impl Expectation {
    /// Distance from the expectation; zero when an inequality holds.
    pub fn gap(&self, computed: ExtReal) -> f64 {
        match *self {
            Expectation::Approx { value, .. } => value.distance(computed),
            Expectation::AtLeast { bound } => (ExtReal::new(bound) - computed).pos_part().get(),
            Expectation::AtMost { bound } => (computed - ExtReal::new(bound)).pos_part().get(),
            Expectation::Info => 0.0,
        }
    }

    pub fn verdict(&self, computed: ExtReal) -> Verdict {
        let gap = self.gap(computed);
        match *self {
            Expectation::Info => Verdict::Info,
            Expectation::Approx { tol, .. } if gap <= tol => Verdict::Pass,
            Expectation::AtLeast { .. } | Expectation::AtMost { .. } if gap == 0.0 => Verdict::Pass,
            _ => Verdict::Fail,
        }
    }
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Approx { value, tol } => write!(f, "{value} +/- {tol:e}"),
            Expectation::AtLeast { bound } => write!(f, ">= {bound}"),
            Expectation::AtMost { bound } => write!(f, "<= {bound}"),
            Expectation::Info => f.write_str("-"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario: String,
    pub quantity: String,
    pub expected: Expectation,
    pub computed: ExtReal,
    pub gap: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    /// The parameters actually used, with defaults filled in.
    pub params: serde_json::Value,
    pub records: Vec<ScenarioRecord>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ScenarioRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn find(&self, quantity: &str) -> Option<&ScenarioRecord> {
        self.records.iter().find(|r| r.quantity == quantity)
    }

    fn push(&mut self, quantity: impl Into<String>, expected: Expectation, computed: ExtReal) {
        self.records.push(ScenarioRecord {
            scenario: self.scenario.clone(),
            quantity: quantity.into(),
            expected,
            computed,
            gap: expected.gap(computed),
            verdict: expected.verdict(computed),
        });
    }
}

/// Knobs shared by the scenarios; each scenario reads the ones it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    /// Depth of the dyadic space.
    pub depth: usize,
    /// Number of atoms of the uniform grid.
    pub grid: usize,
    /// Largest horizon; `None` picks 2000 for the dyadic example and
    /// `min(4000, grid)` for grid processes.
    pub t_max: Option<usize>,
    pub window: usize,
    pub tol: f64,
    /// Quantization points for the Gaussian remark.
    pub points: usize,
    pub quantization: Quantization,
    /// Seed and count of the random bounded instances for the Fatou remark.
    pub seed: u64,
    pub instances: usize,
    pub mode: ExecMode,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            depth: 12,
            grid: 4096,
            t_max: None,
            window: 50,
            tol: 1e-3,
            points: 401,
            quantization: Quantization::Centroid,
            seed: 0,
            instances: 50,
            mode: ExecMode::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_gaps() {
        let e = Expectation::AtLeast { bound: 0.95 };
        assert_eq!(e.gap(ExtReal::new(1.0)), 0.0);
        assert!((e.gap(ExtReal::new(0.9)) - 0.05).abs() < 1e-15);
        assert_eq!(e.verdict(ExtReal::new(0.9)), Verdict::Fail);
        assert_eq!(Expectation::AtMost { bound: 0.0 }.gap(ExtReal::NEG_INF), 0.0);
        assert_eq!(Expectation::AtLeast { bound: 0.0 }.gap(ExtReal::NEG_INF), f64::INFINITY);
        let a = Expectation::Approx { value: ExtReal::POS_INF, tol: 0.0 };
        assert_eq!(a.verdict(ExtReal::POS_INF), Verdict::Pass);
        assert_eq!(Expectation::Info.verdict(ExtReal::NEG_INF), Verdict::Info);
    }
}
