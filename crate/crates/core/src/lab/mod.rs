//! Randomized checks of the axioms and theorems, with replayable witnesses.
//!
//! A [`Property`] runs one trial on a random instance drawn from an
//! [`InstanceGen`]; [`run_campaign`] runs many trials and collects a
//! [`CheckReport`]. Each trial draws from its own ChaCha stream keyed by
//! `(seed, trial)`, so trials are independent of execution order and any
//! witness can be re-run with [`replay`].

mod checks;
mod gen;
pub mod planted;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assess::{AssessorConfig, Entropic, NegAvar, SharedAssessor};
use crate::error::{Error, EstimateError};
use crate::exec::ExecMode;

pub use checks::*;
pub use gen::{Instance, InstanceGen};

/// A violation found in a single trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: usize,
    /// Second time, for two-time properties.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// Horizon, for index properties.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Offending cells of `F_t` (or atoms, for atomwise properties).
    pub cells: Vec<usize>,
    /// Largest amount by which the property is broken, tolerance excluded.
    pub magnitude: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    Pass {
        tolerance: f64,
    },
    Fail(Violation),
    /// Nothing could be asserted, typically because no cell converged.
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    pub trial: u64,
    #[serde(flatten)]
    pub violation: Violation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: String,
    pub seed: u64,
    pub trials: u64,
    pub passed: u64,
    pub inconclusive: u64,
    pub failures: Vec<Witness>,
    /// Largest tolerance applied in any trial.
    pub tolerance: f64,
    pub verdict: CheckVerdict,
}

impl CheckReport {
    fn empty(property: String, seed: u64) -> Self {
        CheckReport {
            property,
            seed,
            trials: 0,
            passed: 0,
            inconclusive: 0,
            failures: Vec::new(),
            tolerance: 0.0,
            verdict: CheckVerdict::Inconclusive,
        }
    }

    fn record(&mut self, trial: u64, outcome: TrialOutcome) {
        self.trials += 1;
        match outcome {
            TrialOutcome::Pass { tolerance } => {
                self.passed += 1;
                self.tolerance = self.tolerance.max(tolerance);
            }
            TrialOutcome::Fail(violation) => {
                self.tolerance = self.tolerance.max(violation.tolerance);
                self.failures.push(Witness { seed: self.seed, trial, violation });
            }
            TrialOutcome::Inconclusive(_) => self.inconclusive += 1,
        }
        self.verdict = verdict_of(self.passed, self.failures.len());
    }

    /// Combines reports of disjoint trial sets of the same campaign.
    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.trials += other.trials;
        self.passed += other.passed;
        self.inconclusive += other.inconclusive;
        self.tolerance = self.tolerance.max(other.tolerance);
        self.failures.extend(other.failures);
        self.failures.sort_by_key(|w| w.trial);
        self.verdict = verdict_of(self.passed, self.failures.len());
        self
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.failures.first()
    }
}

fn verdict_of(passed: u64, failed: usize) -> CheckVerdict {
    if failed > 0 {
        CheckVerdict::Fail
    } else if passed > 0 {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Inconclusive
    }
}

pub trait Property: Send + Sync {
    fn name(&self) -> String;

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError>;
}

/// Runs trial `trial` of the campaign seeded by `gen.seed`.
pub fn replay(prop: &dyn Property, gen: &InstanceGen, trial: u64) -> TrialOutcome {
    let mut rng = gen.rng(trial);
    prop.trial(gen, &mut rng).unwrap_or_else(|e| TrialOutcome::Inconclusive(e.to_string()))
}

pub fn run_campaign(prop: &dyn Property, gen: &InstanceGen, trials: u64, mode: ExecMode) -> CheckReport {
    let outcomes = mode.map_range(0..trials as usize, |k| replay(prop, gen, k as u64));
    let mut report = CheckReport::empty(prop.name(), gen.seed);
    for (k, outcome) in outcomes.into_iter().enumerate() {
        report.record(k as u64, outcome);
    }
    report
}

/// Where a property gets its assessor from.
#[derive(Clone, Debug)]
pub enum AssessorSource {
    Fixed(SharedAssessor),
    /// A fresh entropic assessor per trial, `gamma` uniform in `[lo, hi]`,
    /// with an atom at zero when the range contains it.
    Entropic {
        lo: f64,
        hi: f64,
    },
}

impl AssessorSource {
    pub fn entropic() -> Self {
        AssessorSource::Entropic { lo: -2.0, hi: 2.0 }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> SharedAssessor {
        match self {
            AssessorSource::Fixed(a) => a.clone(),
            AssessorSource::Entropic { lo, hi } => {
                std::sync::Arc::new(Entropic::new(draw_gamma(*lo, *hi, rng)).expect("finite gamma"))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            AssessorSource::Fixed(a) => a.label(),
            AssessorSource::Entropic { lo, hi } => format!("entropic([{lo}, {hi}])"),
        }
    }
}

/// Uniform on `[lo, hi]`, avoiding `0 < |gamma| < 0.05` where `1/gamma`
/// amplifies rounding, and returning exactly zero one time in eight when
/// the range allows it.
pub fn draw_gamma(lo: f64, hi: f64, rng: &mut impl Rng) -> f64 {
    if lo == hi {
        return lo;
    }
    if lo <= 0.0 && hi >= 0.0 && rng.gen_bool(0.125) {
        return 0.0;
    }
    loop {
        let g: f64 = rng.gen_range(lo..=hi);
        if g == 0.0 || g.abs() >= 0.05 || lo.abs().max(hi.abs()) < 0.05 {
            return g;
        }
    }
}

/// Names accepted by [`property`].
pub const PROPERTIES: &[&str] = &[
    "local",
    "index_local",
    "monotone",
    "index_monotone",
    "quasiconcave",
    "scale_invariance",
    "independent_of_past",
    "translation_invariance",
    "rsc_fast_path",
    "gamma_monotone",
    "cash_additive",
    "strong_tc",
    "assessor_supermartingale",
    "assessor_submartingale",
    "supermartingale",
    "submartingale",
    "tc_equivalence",
    "enough1",
    "hat_extension",
];

/// Builds a property by name. Without an assessor, properties draw a random
/// entropic assessor per trial, restricted to the sign the theorem needs.
pub fn property(name: &str, assessor: Option<SharedAssessor>) -> Result<Box<dyn Property>, Error> {
    let src = |lo: f64, hi: f64| match &assessor {
        Some(a) => AssessorSource::Fixed(a.clone()),
        None => AssessorSource::Entropic { lo, hi },
    };
    let gamma_range = |lo: f64, hi: f64| -> Result<(f64, f64), Error> {
        match &assessor {
            None => Ok((lo, hi)),
            Some(a) => match a.entropic_gamma() {
                Some(g) => Ok((g, g)),
                None => Err(Error::Schema(format!("property {name} needs an entropic assessor, got {}", a.label()))),
            },
        }
    };
    let all = || src(-2.0, 2.0);
    Ok(match name {
        "local" => Box::new(Local { src: all() }),
        "index_local" => Box::new(IndexLocal { src: all() }),
        "monotone" => Box::new(Monotone { src: all() }),
        "index_monotone" => Box::new(IndexMonotone { src: all() }),
        "quasiconcave" => Box::new(Quasiconcave { src: all() }),
        "scale_invariance" => Box::new(ScaleInvariance { src: all(), normalized: true }),
        "independent_of_past" => Box::new(IndependentOfPast { src: all() }),
        "translation_invariance" => Box::new(TranslationInvariance { src: all() }),
        "rsc_fast_path" => Box::new(RscFastPath),
        "gamma_monotone" => {
            gamma_range(0.0, 0.0)?;
            Box::new(GammaMonotone { flipped: false })
        }
        "cash_additive" => Box::new(CashAdditive { src: all() }),
        "strong_tc" => Box::new(StrongTc { src: all() }),
        "assessor_supermartingale" => {
            let (lo, hi) = gamma_range(0.0, 2.0)?;
            Box::new(AssessorMartingale { kind: Consistency::Super, gamma: (lo, hi) })
        }
        "assessor_submartingale" => {
            let (lo, hi) = gamma_range(-2.0, 0.0)?;
            Box::new(AssessorMartingale { kind: Consistency::Sub, gamma: (lo, hi) })
        }
        "supermartingale" => {
            let (lo, hi) = gamma_range(0.25, 2.0)?;
            Box::new(IndexMartingale::new(Consistency::Super, (lo, hi)))
        }
        "submartingale" => {
            let (lo, hi) = gamma_range(-2.0, -0.25)?;
            Box::new(IndexMartingale::new(Consistency::Sub, (lo, hi)))
        }
        "tc_equivalence" => {
            let (lo, hi) = gamma_range(-2.0, 2.0)?;
            Box::new(TcEquivalence { gamma: (lo, hi), negated_expectation: false })
        }
        "enough1" => Box::new(Enough1 { src: all() }),
        "hat_extension" => Box::new(HatExtensionCheck { src: all() }),
        other => return Err(Error::Schema(format!("unknown property {other:?}"))),
    })
}

/// The axiom suite: every property whose theorem covers the random
/// instances, each expected to pass with zero failures.
pub const AXIOM_SUITE: &[&str] = &[
    "scale_invariance",
    "local",
    "index_local",
    "monotone",
    "index_monotone",
    "quasiconcave",
    "gamma_monotone",
    "cash_additive",
    "strong_tc",
    "assessor_supermartingale",
    "assessor_submartingale",
    "tc_equivalence",
];

/// What a campaign is expected to produce.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedVerdict {
    #[default]
    Pass,
    Fail,
}

/// A campaign as read from a config file. Tolerances are fixed per property
/// and reported, so there is no `tol` key; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub property: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assessor: Option<AssessorConfig>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the known outcome: strong time consistency fails for the
    /// average value at risk, everything else passes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectedVerdict>,
    #[serde(default)]
    pub gen: Option<InstanceGen>,
}

impl CampaignConfig {
    pub fn expected(&self) -> ExpectedVerdict {
        self.expect.unwrap_or_else(|| match (&self.property[..], &self.assessor) {
            ("strong_tc", Some(AssessorConfig::NegAvar { alpha })) if *alpha < 1.0 => ExpectedVerdict::Fail,
            _ => ExpectedVerdict::Pass,
        })
    }

    pub fn run(&self, mode: ExecMode) -> Result<CheckReport, Error> {
        if self.trials == 0 {
            return Err(Error::Schema("a campaign needs at least one trial".into()));
        }
        let assessor = self.assessor.as_ref().map(AssessorConfig::build).transpose()?;
        let prop = property(&self.property, assessor)?;
        let gen = InstanceGen { seed: self.seed, ..self.gen.clone().unwrap_or_default() };
        Ok(run_campaign(prop.as_ref(), &gen, self.trials, mode))
    }
}

/// Whether a report matches what its campaign expected. An expected failure
/// must come with a witness.
pub fn meets_expectation(report: &CheckReport, expected: ExpectedVerdict) -> bool {
    match expected {
        ExpectedVerdict::Pass => report.verdict != CheckVerdict::Fail,
        ExpectedVerdict::Fail => report.verdict == CheckVerdict::Fail && !report.failures.is_empty(),
    }
}

/// Average value at risk at level one half, the standard example of an
/// assessor that is not strongly time consistent.
pub fn half_avar() -> SharedAssessor {
    std::sync::Arc::new(NegAvar::new(0.5).expect("valid level"))
}
