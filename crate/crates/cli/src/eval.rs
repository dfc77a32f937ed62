use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::Args;
use growthlab_core::assess::{AssessorConfig, SharedAssessor};
use growthlab_core::growth::{dlgi, iid_rsc_closed_form, rsc, EstimatorConfig, LiminfEstimate};
use growthlab_core::io::{parse_space, LoadedProcess, ProcessFile};
use growthlab_core::{ExecMode, ExtReal};
use serde_json::{json, Value};

use crate::output::{emit, Records};
use crate::{Outcome, OutputArgs};

#[derive(Args)]
pub struct EvalArgs {
    /// Process file (kind explicit, iid or builtin).
    #[arg(long)]
    process: PathBuf,
    /// Space file for explicit processes that do not carry one.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Risk sensitivity of the criterion; repeat for several.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Vec<f64>,
    /// Assessor for a growth index, as shorthand (`neg_avar:0.1`) or JSON; repeatable.
    #[arg(long)]
    assessor: Vec<String>,
    /// Evaluation times; repeatable.
    #[arg(long = "t", default_values_t = [0usize])]
    times: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    tmax: usize,
    #[arg(long, default_value_t = 50)]
    window: usize,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

enum Index {
    Rsc(f64),
    Dlgi(AssessorConfig, SharedAssessor),
}

impl Index {
    fn columns(&self) -> (Value, Value) {
        match self {
            Index::Rsc(g) => (json!("rsc"), json!(g)),
            Index::Dlgi(_, a) => (json!(a.label()), a.entropic_gamma().map_or(Value::Null, |g| json!(g))),
        }
    }
}

fn ext(x: ExtReal) -> Value {
    serde_json::to_value(x).expect("extended reals serialize")
}

pub fn run(args: EvalArgs, mode: ExecMode) -> anyhow::Result<Outcome> {
    let cfg = EstimatorConfig { t_max: args.tmax, window: args.window, tol: args.tol, mode };
    for &t in &args.times {
        cfg.validate(t).with_context(|| format!("at t = {t}"))?;
    }
    let text = std::fs::read_to_string(&args.process).with_context(|| format!("reading {}", args.process.display()))?;
    let file = ProcessFile::parse(&text).with_context(|| format!("parsing {}", args.process.display()))?;
    let space = match &args.space {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(Arc::new(parse_space(&text).with_context(|| format!("parsing {}", path.display()))?))
        }
        None => None,
    };
    let process = file.load(space).with_context(|| format!("loading {}", args.process.display()))?;

    let mut gammas = args.gamma.clone();
    let mut indices = Vec::new();
    for spec in &args.assessor {
        let config = AssessorConfig::parse(spec).with_context(|| format!("assessor {spec:?}"))?;
        let built = config.build().with_context(|| format!("assessor {spec:?}"))?;
        indices.push(Index::Dlgi(config, built));
    }
    if gammas.is_empty() && indices.is_empty() {
        gammas.push(0.0);
    }
    let mut all: Vec<Index> = gammas.iter().map(|&g| Index::Rsc(g)).collect();
    all.append(&mut indices);

    let config = json!({
        "process": args.process,
        "space": args.space,
        "gamma": gammas,
        "assessor": all.iter().filter_map(|i| match i { Index::Dlgi(c, _) => Some(c), _ => None }).collect::<Vec<_>>(),
        "t": args.times,
        "t_max": args.tmax,
        "window": args.window,
        "tol": args.tol,
    });
    let mut records =
        Records::new("eval", config, vec!["t", "index", "gamma", "cell", "value", "converged", "tail_spread"]);

    let items: Vec<(usize, &Index)> = args.times.iter().flat_map(|&t| all.iter().map(move |i| (t, i))).collect();
    match &process {
        LoadedProcess::Iid { step, .. } => {
            for (t, index) in items {
                let gamma = match index {
                    Index::Rsc(g) => *g,
                    Index::Dlgi(_, a) => match a.entropic_gamma() {
                        Some(g) => g,
                        None => bail!(
                            "{} on an i.i.d. process needs an explicit tree; only entropic indices have a closed form",
                            a.label()
                        ),
                    },
                };
                let (name, g) = index.columns();
                let kappa = ExtReal::new(iid_rsc_closed_form(step, gamma));
                records.push(vec![json!(t), name, g, json!("all"), ext(kappa), json!(true), ext(ExtReal::ZERO)]);
            }
        }
        LoadedProcess::Tree(v) => {
            let estimates: Vec<anyhow::Result<LiminfEstimate>> = mode.map_slice(&items, |&(t, index)| {
                Ok(match index {
                    Index::Rsc(g) => rsc(v, t, *g, &cfg)?,
                    Index::Dlgi(_, a) => dlgi(v, t, a.as_ref(), &cfg)?,
                })
            });
            for ((t, index), est) in items.iter().zip(estimates) {
                let est = est.with_context(|| format!("at t = {t}"))?;
                let (name, g) = index.columns();
                for (k, value) in est.cells.iter().enumerate() {
                    records.push(vec![
                        json!(t),
                        name.clone(),
                        g.clone(),
                        json!(k.to_string()),
                        ext(*value),
                        json!(est.converged[k]),
                        ext(est.tail_spread[k]),
                    ]);
                }
            }
        }
    }
    emit(&records.render(args.output.format), args.output.out.as_deref())?;
    Ok(Outcome::Expected)
}
