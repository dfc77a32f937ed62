use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assess::{entropic_cell, hat_eval, Assessor, Entropic, RiskSeeking};
use crate::error::EstimateError;
use crate::exec::ExecMode;
use crate::ext::ExtReal;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

use super::value::ValueProcess;

/// Finite-horizon realization of the liminf: the minimum of `g_T` over the
/// window `[t_max - window, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub t_max: usize,
    pub window: usize,
    /// A cell counts as converged when its spread over the window is below this.
    pub tol: f64,
    #[serde(default)]
    pub mode: ExecMode,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { t_max: 2000, window: 50, tol: 1e-3, mode: ExecMode::default() }
    }
}

impl EstimatorConfig {
    pub fn validate(&self, t: usize) -> Result<(), EstimateError> {
        if self.t_max <= t {
            return Err(EstimateError::HorizonTooShort { t, t_max: self.t_max });
        }
        if self.t_max - t <= self.window {
            return Err(EstimateError::WindowTooLarge { t, t_max: self.t_max, window: self.window });
        }
        Ok(())
    }

    pub fn window_start(&self) -> usize {
        self.t_max - self.window
    }
}

/// `g_T` on each cell of `F_t`, for a run of horizons.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizonSequence {
    pub t: usize,
    pub horizons: Vec<usize>,
    /// `cells[k][c]` is `g_{horizons[k]}` on cell `c`.
    pub cells: Vec<Vec<ExtReal>>,
}

impl HorizonSequence {
    pub fn at(&self, big_t: usize) -> Option<&[ExtReal]> {
        let k = self.horizons.iter().position(|&h| h == big_t)?;
        Some(&self.cells[k])
    }

    pub fn to_variable(&self, space: &FilteredSpace, big_t: usize) -> Option<RandomVariable> {
        self.at(big_t).map(|c| space.broadcast(self.t, c))
    }

    /// Builds a sequence from explicit per-horizon values (one cell).
    pub fn from_scalars(t: usize, horizons: Vec<usize>, values: Vec<ExtReal>) -> Self {
        HorizonSequence { t, horizons, cells: values.into_iter().map(|v| vec![v]).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiminfEstimate {
    pub t: usize,
    pub cells: Vec<ExtReal>,
    pub converged: Vec<bool>,
    pub tail_spread: Vec<ExtReal>,
}

impl LiminfEstimate {
    pub fn value(&self, space: &FilteredSpace) -> RandomVariable {
        space.broadcast(self.t, &self.cells)
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn map_cells(&self, f: impl Fn(ExtReal) -> ExtReal) -> Self {
        LiminfEstimate { cells: self.cells.iter().map(|&c| f(c)).collect(), ..self.clone() }
    }
}

/// `mu_t(ln(V_T / V_t)) / T` per cell, or `mu_t(ln V_T) / T` when not normalized.
pub fn index_at(
    v: &ValueProcess,
    t: usize,
    mu: &dyn Assessor,
    big_t: usize,
    normalized: bool,
) -> Result<Vec<ExtReal>, EstimateError> {
    let x = if normalized { v.log_ratio(big_t, t)? } else { v.log_value(big_t)? };
    let y = hat_eval(mu, v.space(), t, &x)?.value;
    Ok(per_horizon(v.space().cell_representatives(t, &y), big_t))
}

/// Entropic fast path: `(1 / (gamma T)) ln E[(V_T / V_t)^gamma | F_t]` per
/// cell, evaluated in log space without materializing `mu_t`.
pub fn rsc_at(v: &ValueProcess, t: usize, gamma: f64, big_t: usize) -> Result<Vec<ExtReal>, EstimateError> {
    if !gamma.is_finite() {
        return Err(EstimateError::BadGamma);
    }
    let x = v.log_ratio(big_t, t)?;
    Ok(per_horizon(v.space().reduce_cells(t, &x, |p, vals| entropic_cell(gamma, p, vals)), big_t))
}

fn per_horizon(cells: Vec<ExtReal>, big_t: usize) -> Vec<ExtReal> {
    let tf = big_t as f64;
    cells.into_iter().map(|c| c.div_scalar(tf)).collect()
}

fn sweep<F>(t: usize, horizons: Vec<usize>, mode: ExecMode, f: F) -> Result<HorizonSequence, EstimateError>
where
    F: Fn(usize) -> Result<Vec<ExtReal>, EstimateError> + Sync + Send,
{
    let cells = mode.map_slice(&horizons, |&h| f(h)).into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(HorizonSequence { t, horizons, cells })
}

/// `g_T` for `T = t+1..=t_max`.
pub fn horizon_seq(
    v: &ValueProcess,
    t: usize,
    mu: &dyn Assessor,
    t_max: usize,
    mode: ExecMode,
) -> Result<HorizonSequence, EstimateError> {
    if t_max <= t {
        return Err(EstimateError::HorizonTooShort { t, t_max });
    }
    sweep(t, (t + 1..=t_max).collect(), mode, |h| index_at(v, t, mu, h, true))
}

/// Per-cell minimum over the window of `seq`.
pub fn liminf_estimate(seq: &HorizonSequence, cfg: &EstimatorConfig) -> Result<LiminfEstimate, EstimateError> {
    cfg.validate(seq.t)?;
    let lo = cfg.window_start();
    let rows: Vec<&Vec<ExtReal>> =
        seq.horizons.iter().zip(&seq.cells).filter(|(h, _)| (lo..=cfg.t_max).contains(*h)).map(|(_, c)| c).collect();
    if rows.len() != cfg.window + 1 {
        return Err(EstimateError::WindowTooLarge { t: seq.t, t_max: cfg.t_max, window: cfg.window });
    }
    let n_cells = rows[0].len();
    let mut cells = Vec::with_capacity(n_cells);
    let mut converged = Vec::with_capacity(n_cells);
    let mut tail_spread = Vec::with_capacity(n_cells);
    for c in 0..n_cells {
        let min = rows.iter().map(|r| r[c]).min().expect("nonempty window");
        let max = rows.iter().map(|r| r[c]).max().expect("nonempty window");
        let spread = max.distance(min);
        cells.push(min);
        converged.push(min.is_neg_inf() || spread < cfg.tol);
        tail_spread.push(ExtReal::new(spread));
    }
    Ok(LiminfEstimate { t: seq.t, cells, converged, tail_spread })
}

fn window_seq<F>(t: usize, cfg: &EstimatorConfig, f: F) -> Result<HorizonSequence, EstimateError>
where
    F: Fn(usize) -> Result<Vec<ExtReal>, EstimateError> + Sync + Send,
{
    cfg.validate(t)?;
    sweep(t, (cfg.window_start()..=cfg.t_max).collect(), cfg.mode, f)
}

/// Dynamic limit growth index at `t`. Only the window horizons are evaluated.
pub fn dlgi(
    v: &ValueProcess,
    t: usize,
    mu: &dyn Assessor,
    cfg: &EstimatorConfig,
) -> Result<LiminfEstimate, EstimateError> {
    liminf_estimate(&window_seq(t, cfg, |h| index_at(v, t, mu, h, true))?, cfg)
}

/// The index without the `1 / V_t` normalization, `liminf mu_t(ln V_T) / T`.
pub fn dlgi_unnormalized(
    v: &ValueProcess,
    t: usize,
    mu: &dyn Assessor,
    cfg: &EstimatorConfig,
) -> Result<LiminfEstimate, EstimateError> {
    liminf_estimate(&window_seq(t, cfg, |h| index_at(v, t, mu, h, false))?, cfg)
}

/// Risk sensitive criterion `phi^gamma_t`, through the entropic fast path.
pub fn rsc(v: &ValueProcess, t: usize, gamma: f64, cfg: &EstimatorConfig) -> Result<LiminfEstimate, EstimateError> {
    liminf_estimate(&window_seq(t, cfg, |h| rsc_at(v, t, gamma, h))?, cfg)
}

/// Fast-path `g_T` for `T = t+1..=t_max`.
pub fn rsc_horizon_seq(
    v: &ValueProcess,
    t: usize,
    gamma: f64,
    t_max: usize,
    mode: ExecMode,
) -> Result<HorizonSequence, EstimateError> {
    if t_max <= t {
        return Err(EstimateError::HorizonTooShort { t, t_max });
    }
    sweep(t, (t + 1..=t_max).collect(), mode, |h| rsc_at(v, t, gamma, h))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RscPlus {
    /// `max(phi^gamma_t, 0)` per cell.
    pub value: LiminfEstimate,
    /// `phi^gamma_t` before taking the positive part.
    pub rsc: LiminfEstimate,
    /// The same index through the risk-seeking assessor `mu(X^+)`.
    pub risk_seeking: LiminfEstimate,
}

impl RscPlus {
    /// Largest per-cell distance between the two paths.
    pub fn path_gap(&self) -> f64 {
        self.value.cells.iter().zip(&self.risk_seeking.cells).map(|(a, b)| a.distance(*b)).fold(0.0, f64::max)
    }
}

pub fn rsc_plus(v: &ValueProcess, t: usize, gamma: f64, cfg: &EstimatorConfig) -> Result<RscPlus, EstimateError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(EstimateError::BadGamma);
    }
    let raw = rsc(v, t, gamma, cfg)?;
    let seeker = RiskSeeking::new(Arc::new(Entropic::new(gamma)?));
    let risk_seeking = dlgi(v, t, &seeker, cfg)?;
    Ok(RscPlus { value: raw.map_cells(ExtReal::pos_part), rsc: raw, risk_seeking })
}

/// Normalized versus un-normalized index at the same `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enough1Report {
    pub normalized: LiminfEstimate,
    pub unnormalized: LiminfEstimate,
    pub gap: Vec<f64>,
    /// `max |ln V_t| / (t_max - window)` over finite values.
    pub bound: f64,
    pub pass: bool,
}

pub fn check_enough1(
    v: &ValueProcess,
    t: usize,
    mu: &dyn Assessor,
    cfg: &EstimatorConfig,
) -> Result<Enough1Report, EstimateError> {
    let normalized = dlgi(v, t, mu, cfg)?;
    let unnormalized = dlgi_unnormalized(v, t, mu, cfg)?;
    let gap: Vec<f64> = normalized.cells.iter().zip(&unnormalized.cells).map(|(a, b)| a.distance(*b)).collect();
    let bound = v.log_value(t)?.max_abs_finite() / cfg.window_start() as f64;
    let slack = 1e-12 * (1.0 + bound);
    let pass = gap
        .iter()
        .enumerate()
        .filter(|&(c, _)| normalized.converged[c] && unnormalized.converged[c])
        .all(|(_, &g)| g <= bound + slack);
    Ok(Enough1Report { normalized, unnormalized, gap, bound, pass })
}
