use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use growthlab_core::assess::AssessorConfig;
use growthlab_core::lab::{
    meets_expectation, CampaignConfig, CheckReport, ExpectedVerdict, InstanceGen, AXIOM_SUITE, PROPERTIES,
};
use growthlab_core::ExecMode;
use serde_json::{json, Value};

use crate::output::{emit, Format, Records};
use crate::{Outcome, OutputArgs};

#[derive(Args)]
pub struct PropsArgs {
    /// Property name; repeatable. `axioms` expands to the axiom suite, `all`
    /// to every property.
    #[arg(long)]
    property: Vec<String>,
    /// Fixed assessor, as shorthand or JSON; otherwise entropic with a random
    /// risk sensitivity per trial.
    #[arg(long)]
    assessor: Option<String>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Campaign file: one campaign object or a list of them.
    #[arg(long, conflicts_with_all = ["property", "assessor"])]
    config: Option<PathBuf>,
    /// Overrides the expected outcome of every campaign.
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Pass,
    Fail,
}

fn campaigns(args: &PropsArgs) -> anyhow::Result<Vec<CampaignConfig>> {
    let mut list = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed = if text.trim_start().starts_with('[') {
            serde_json::from_str(&text)
        } else {
            serde_json::from_str(&text).map(|c| vec![c])
        };
        parsed.with_context(|| format!("parsing {}", path.display()))?
    } else {
        if args.property.is_empty() {
            bail!("name at least one --property, or pass --config");
        }
        let assessor = args
            .assessor
            .as_deref()
            .map(|s| AssessorConfig::parse(s).with_context(|| format!("assessor {s:?}")))
            .transpose()?;
        let mut names: Vec<&str> = Vec::new();
        for p in &args.property {
            match p.as_str() {
                "axioms" => names.extend(AXIOM_SUITE),
                "all" => names.extend(PROPERTIES),
                other => names.push(other),
            }
        }
        names
            .into_iter()
            .map(|name| CampaignConfig {
                property: name.to_string(),
                assessor: assessor.clone(),
                trials: args.trials,
                seed: args.seed,
                expect: None,
                gen: None,
            })
            .collect()
    };
    for c in &mut list {
        if c.trials == 0 {
            bail!("campaign {} needs at least one trial", c.property);
        }
        if !PROPERTIES.contains(&c.property.as_str()) {
            bail!("unknown property {:?}; known: {}", c.property, PROPERTIES.join(", "));
        }
        match args.expect {
            Some(Expect::Pass) => c.expect = Some(ExpectedVerdict::Pass),
            Some(Expect::Fail) => c.expect = Some(ExpectedVerdict::Fail),
            None => {}
        }
    }
    Ok(list)
}

fn witness_summary(report: &CheckReport) -> Value {
    match report.first_witness() {
        None => Value::Null,
        Some(w) => {
            let v = &w.violation;
            let s = v.s.map_or(String::new(), |s| format!(" s={s}"));
            let h = v.horizon.map_or(String::new(), |h| format!(" T={h}"));
            json!(format!("trial {}: t={}{s}{h} cells {:?} by {:.3e}", w.trial, v.t, v.cells, v.magnitude))
        }
    }
}

pub fn run(args: PropsArgs, mode: ExecMode) -> anyhow::Result<Outcome> {
    let list = campaigns(&args)?;
    let reports: Vec<anyhow::Result<CheckReport>> =
        mode.map_slice(&list, |c| c.run(mode).with_context(|| format!("property {}", c.property)));
    let reports = reports.into_iter().collect::<anyhow::Result<Vec<_>>>()?;

    let format = args.output.format;
    let config = json!(list
        .iter()
        .map(|c| json!({
            "property": c.property,
            "assessor": c.assessor,
            "trials": c.trials,
            "seed": c.seed,
            "expect": c.expected(),
            "gen": InstanceGen { seed: c.seed, ..c.gen.clone().unwrap_or_default() },
        }))
        .collect::<Vec<_>>());
    let mut records = Records::new(
        "props",
        config,
        vec![
            "property",
            "assessor",
            "seed",
            "trials",
            "passed",
            "inconclusive",
            "failed",
            "tolerance",
            "verdict",
            "expect",
            "as_expected",
            "witness",
        ],
    );
    let mut all_expected = true;
    for (c, r) in list.iter().zip(&reports) {
        let expected = c.expected();
        let ok = meets_expectation(r, expected);
        all_expected &= ok;
        let assessor = c.assessor.as_ref().map_or(json!("entropic(random)"), |a| match a.build() {
            Ok(built) => json!(built.label()),
            Err(_) => json!(a),
        });
        let witness = if format == Format::Json { serde_json::to_value(&r.failures)? } else { witness_summary(r) };
        records.push(vec![
            json!(r.property),
            assessor,
            json!(r.seed),
            json!(r.trials),
            json!(r.passed),
            json!(r.inconclusive),
            json!(r.failures.len()),
            json!(r.tolerance),
            serde_json::to_value(r.verdict)?,
            serde_json::to_value(expected)?,
            json!(ok),
            witness,
        ]);
    }
    emit(&records.render(format), args.output.out.as_deref())?;
    Ok(if all_expected { Outcome::Expected } else { Outcome::Unexpected })
}
