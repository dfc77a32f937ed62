//! Acceptance criteria, one printed line each. Runs without the libtest
//! harness so the lines always show; exits nonzero if any criterion fails.

use std::sync::Arc;
use std::time::Instant;

use growthlab_core::assess::{
    hat_eval, Assessor, CertaintyEquivalent, Entropic, SharedAssessor, SupPlusInf, UtilitySpec,
};
use growthlab_core::growth::{
    check_enough1, iid_rsc_closed_form, iid_tree, rsc, rsc_at, EstimatorConfig, Quantization, StepDistribution,
};
use growthlab_core::lab::{
    property, replay, run_campaign, AssessorSource, CheckVerdict, HatExtensionCheck, InstanceGen, StrongTc,
    TrialOutcome, AXIOM_SUITE,
};
use growthlab_core::scenarios::{dyadic_vhat, notacc, notrej};
use growthlab_core::{ExecMode, ExtReal, FilteredSpace, RandomVariable};

struct Line {
    pass: bool,
    text: String,
}

fn line(pass: bool, text: impl Into<String>) -> Line {
    Line { pass, text: text.into() }
}

fn cfg(t_max: usize, window: usize) -> EstimatorConfig {
    EstimatorConfig { t_max, window, tol: 1e-3, mode: ExecMode::Sequential }
}

fn dyadic_table() -> Line {
    let start = Instant::now();
    let depth = 12;
    let v = dyadic_vhat(depth).unwrap();
    let c = cfg(2000, 50);
    let mut worst = 0.0f64;
    let mut count = 0;
    for t in 0..=2usize {
        let denom = 2f64.powi(t as i32 + 1);
        for gamma in [-1.0, 0.0, 1.0] {
            let est = rsc(&v, t, gamma, &c).unwrap();
            for (k, value) in est.cells.iter().enumerate() {
                let i = (k + 1) as f64;
                let want = if gamma < 0.0 {
                    2.0 * (i - 1.0) / denom + 2f64.powi(-13)
                } else if gamma == 0.0 {
                    (2.0 * i - 1.0) / denom
                } else {
                    2.0 * i / denom
                };
                worst = worst.max((value.get() - want).abs());
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        worst <= 1e-2 && secs < 60.0 && count == 21,
        format!("dyadic example table: {count} cells, max |estimate - table| = {worst:.3e} (tol 1e-2), {secs:.1}s single-threaded"),
    )
}

fn counterexample(name: &str) -> Line {
    let (v, gamma) = if name == "notacc" { (notacc(4096).unwrap(), -1.0) } else { (notrej(4096).unwrap(), 1.0) };
    let c = cfg(4000, 50);
    let phi1 = rsc(&v, 1, gamma, &c).unwrap();
    let phi0 = rsc(&v, 0, gamma, &c).unwrap().cells[0].get();
    let space = v.space();
    let e_phi1 = space.expectation(&phi1.value(space)).get();
    let rest = phi1.cells[1..].iter().map(|x| x.get());
    if name == "notacc" {
        let lowest = rest.fold(f64::INFINITY, f64::min);
        let violation = e_phi1 - phi0;
        line(
            lowest >= 0.95 && phi0 <= 0.05 && violation >= 0.9,
            format!(
                "notacc, gamma = -1: min phi_1 off the first atom = {lowest:.4} (>= 0.95), phi_0 = {phi0:.3e} (<= 0.05), E[phi_1] - phi_0 = {violation:.4} (>= 0.9)"
            ),
        )
    } else {
        let highest = rest.fold(f64::NEG_INFINITY, f64::max);
        let violation = phi0 - e_phi1;
        line(
            highest <= 0.05 && phi0 >= 0.95 && violation >= 0.9,
            format!(
                "notrej, gamma = 1: max phi_1 off the first atom = {highest:.3e} (<= 0.05), phi_0 = {phi0:.4} (>= 0.95), phi_0 - E[phi_1] = {violation:.4} (>= 0.9)"
            ),
        )
    }
}

/// `(1/(gamma T)) ln E[exp(gamma S_T)]` by listing all `2^T` paths.
fn brute_force(sigma: f64, gamma: f64, horizon: u32) -> f64 {
    let n = 1u32 << horizon;
    let p = 1.0 / n as f64;
    let moment: f64 = (0..n)
        .map(|path| {
            let ups = path.count_ones() as f64;
            let s = sigma * (2.0 * ups - horizon as f64);
            p * (gamma * s).exp()
        })
        .sum();
    moment.ln() / (gamma * horizon as f64)
}

fn iid_oracle() -> Line {
    let mut worst_brute = 0.0f64;
    let mut worst_cosh = 0.0f64;
    let mut worst_tree = 0.0f64;
    for sigma in [0.5, 1.0] {
        let step = StepDistribution::binomial(sigma).unwrap();
        let tree = iid_tree(&step, 1.0, 6).unwrap();
        for gamma in [-1.0, -0.5, 0.5, 1.0] {
            let kappa = iid_rsc_closed_form(&step, gamma);
            worst_brute = worst_brute.max((kappa - brute_force(sigma, gamma, 6)).abs());
            worst_cosh = worst_cosh.max((kappa - (gamma * sigma).cosh().ln() / gamma).abs());
            worst_tree = worst_tree.max((kappa - rsc_at(&tree, 0, gamma, 6).unwrap()[0].get()).abs());
        }
    }
    line(
        worst_brute <= 1e-12 && worst_cosh <= 1e-12 && worst_tree <= 1e-12,
        format!(
            "i.i.d. binomial: closed form vs brute force T = 6 {worst_brute:.1e}, vs ln cosh / gamma {worst_cosh:.1e}, vs tree index {worst_tree:.1e} (tol 1e-12)"
        ),
    )
}

fn gaussian() -> Line {
    let step = StepDistribution::standard_normal(401, Quantization::Centroid).unwrap();
    let worst =
        [-1.0, -0.5, 0.5, 1.0].iter().map(|&g| (iid_rsc_closed_form(&step, g) - g / 2.0).abs()).fold(0.0, f64::max);
    let at_zero = iid_rsc_closed_form(&step, 0.0);
    line(
        worst <= 2e-3 && at_zero == 0.0,
        format!("Gaussian 401 points: max |kappa - gamma/2| = {worst:.3e} (tol 2e-3), kappa at gamma = 0 is {at_zero}"),
    )
}

fn axiom_suite() -> Line {
    let start = Instant::now();
    let gen = InstanceGen::with_seed(2024);
    let mut summary = Vec::new();
    let mut failures = 0;
    for name in AXIOM_SUITE {
        let prop = property(name, None).unwrap();
        let rep = run_campaign(prop.as_ref(), &gen, 200, ExecMode::default());
        failures += rep.failures.len();
        if rep.verdict != CheckVerdict::Pass {
            summary.push(format!("{name}: {:?}", rep.verdict));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = if summary.is_empty() { String::new() } else { format!(" [{}]", summary.join(", ")) };
    line(
        failures == 0 && summary.is_empty() && secs < 60.0,
        format!("axiom suite: {} properties x 200 trials, {failures} failures, {secs:.1}s{detail}", AXIOM_SUITE.len()),
    )
}

fn fatou() -> Line {
    let space = FilteredSpace::dyadic(2).unwrap();
    let x = RandomVariable::new(vec![ExtReal::POS_INF, ExtReal::NEG_INF, ExtReal::ZERO, ExtReal::ZERO]);
    let direct = SupPlusInf.evaluate(&space, 0, &x).unwrap()[0];
    let hat = hat_eval(&SupPlusInf, &space, 0, &x).unwrap().value[0];
    let bounded: Vec<SharedAssessor> = vec![
        Arc::new(SupPlusInf),
        Arc::new(Entropic::new(-1.0).unwrap()),
        Arc::new(CertaintyEquivalent::new(UtilitySpec::wavy(0.5).unwrap())),
    ];
    let gen = InstanceGen::with_seed(7);
    let mismatches: usize = bounded
        .into_iter()
        .map(|a| {
            let rep = run_campaign(&HatExtensionCheck { src: AssessorSource::Fixed(a) }, &gen, 50, ExecMode::default());
            rep.failures.len() + rep.inconclusive as usize
        })
        .sum();
    line(
        direct == ExtReal::NEG_INF && hat == ExtReal::POS_INF && mismatches == 0,
        format!("Fatou remark: direct f_0 = {direct}, hat f_0 = {hat}; hat != direct on {mismatches} of 150 bounded instances"),
    )
}

fn enough1() -> Line {
    let gen = InstanceGen::with_seed(8);
    let c = cfg(2000, 50);
    let mut passed = 0;
    let mut checked_cells = 0;
    let mut worst_ratio = 0.0f64;
    for trial in 0..50 {
        let mut rng = gen.rng(trial);
        let inst = gen.instance(&mut rng);
        let gamma = growthlab_core::lab::draw_gamma(-2.0, 2.0, &mut rng);
        let rep = check_enough1(&inst.v, inst.t, &Entropic::new(gamma).unwrap(), &c).unwrap();
        for (k, gap) in rep.gap.iter().enumerate() {
            if rep.normalized.converged[k] && rep.unnormalized.converged[k] && rep.bound > 0.0 {
                checked_cells += 1;
                worst_ratio = worst_ratio.max(gap / rep.bound);
            }
        }
        passed += rep.pass as usize;
    }
    line(
        passed == 50 && checked_cells > 0,
        format!(
            "enough1: {passed} of 50 instances within max |ln V_t| / (T_max - W), {checked_cells} converged cells, worst gap / bound = {worst_ratio:.4}"
        ),
    )
}

fn strong_tc_witness() -> Line {
    let prop = StrongTc { src: AssessorSource::Fixed(growthlab_core::lab::half_avar()) };
    let gen = InstanceGen::with_seed(42);
    let rep = run_campaign(&prop, &gen, 500, ExecMode::default());
    let Some(w) = rep.first_witness() else {
        return line(false, "strong TC witness for neg_avar(0.5): none found in 500 trials");
    };
    let again = replay(&prop, &InstanceGen::with_seed(w.seed), w.trial);
    let replays = again == TrialOutcome::Fail(w.violation.clone());
    line(
        replays,
        format!(
            "strong TC witness for neg_avar(0.5): {} of 500 trials violate, first at trial {} (t = {}, s = {:?}, magnitude {:.3e}), replay {}",
            rep.failures.len(),
            w.trial,
            w.violation.t,
            w.violation.s,
            w.violation.magnitude,
            if replays { "identical" } else { "differs" }
        ),
    )
}

type Criterion = (&'static str, fn() -> Line);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1", dyadic_table),
        ("2", || counterexample("notacc")),
        ("3", || counterexample("notrej")),
        ("4", iid_oracle),
        ("5", gaussian),
        ("6", axiom_suite),
        ("7", fatou),
        ("8", enough1),
        ("9", strong_tc_witness),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let l = run();
        failed += (!l.pass) as usize;
        println!("[{}] criterion {id}: {}", if l.pass { "PASS" } else { "FAIL" }, l.text);
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
