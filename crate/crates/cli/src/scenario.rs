use anyhow::{bail, Context};
use clap::Args;
use growthlab_core::growth::Quantization;
use growthlab_core::scenarios::{run_scenario, ScenarioParams, ScenarioReport, Verdict, SCENARIOS};
use growthlab_core::{ExecMode, ExtReal};
use serde_json::{json, Value};

use crate::output::{emit, Records};
use crate::{Outcome, OutputArgs};

#[derive(Args)]
pub struct ScenarioArgs {
    /// Scenario name, or `all`.
    name: String,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tmax: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Quantization points for the Gaussian scenario.
    #[arg(long)]
    points: Option<usize>,
    /// `centroid` or `mid_quantile`.
    #[arg(long)]
    quantization: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn params(args: &ScenarioArgs, mode: ExecMode) -> anyhow::Result<ScenarioParams> {
    let d = ScenarioParams::default();
    let quantization = match &args.quantization {
        Some(q) => serde_json::from_value::<Quantization>(json!(q))
            .with_context(|| format!("unknown quantization {q:?}; use centroid or mid_quantile"))?,
        None => d.quantization,
    };
    Ok(ScenarioParams {
        depth: args.depth.unwrap_or(d.depth),
        grid: args.grid.unwrap_or(d.grid),
        t_max: args.tmax.or(d.t_max),
        window: args.window.unwrap_or(d.window),
        tol: args.tol.unwrap_or(d.tol),
        points: args.points.unwrap_or(d.points),
        quantization,
        seed: args.seed.unwrap_or(d.seed),
        instances: args.instances.unwrap_or(d.instances),
        mode,
    })
}

/// The echoed parameters leave out the execution mode, which never changes
/// the numbers.
fn without_mode(params: &Value) -> Value {
    let mut p = params.clone();
    if let Some(obj) = p.as_object_mut() {
        obj.remove("mode");
    }
    p
}

pub fn run(args: ScenarioArgs, mode: ExecMode) -> anyhow::Result<Outcome> {
    let names: Vec<&str> = match args.name.as_str() {
        "all" => SCENARIOS.to_vec(),
        name if SCENARIOS.contains(&name) => vec![name],
        other => bail!("unknown scenario {other:?}; known: {}", SCENARIOS.join(", ")),
    };
    let params = params(&args, mode)?;
    let reports: Vec<anyhow::Result<ScenarioReport>> =
        mode.map_slice(&names, |name| run_scenario(name, &params).with_context(|| format!("scenario {name}")));
    let reports = reports.into_iter().collect::<anyhow::Result<Vec<_>>>()?;

    let config = json!({
        "scenarios": names,
        "params": reports.iter().map(|r| (r.scenario.clone(), without_mode(&r.params))).collect::<serde_json::Map<String, Value>>(),
    });
    let mut records =
        Records::new("scenario", config, vec!["scenario", "quantity", "expected", "computed", "gap", "verdict"]);
    for r in reports.iter().flat_map(|r| &r.records) {
        records.push(vec![
            json!(r.scenario),
            json!(r.quantity),
            json!(r.expected.to_string()),
            serde_json::to_value(r.computed)?,
            serde_json::to_value(ExtReal::new(r.gap))?,
            serde_json::to_value(r.verdict)?,
        ]);
    }
    emit(&records.render(args.output.format), args.output.out.as_deref())?;
    let failed = reports.iter().flat_map(|r| &r.records).any(|r| r.verdict == Verdict::Fail);
    Ok(if failed { Outcome::Unexpected } else { Outcome::Expected })
}
