//! The individual properties.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::assess::{hat_eval, hat_schedule, Assessor, Entropic};
use crate::error::{EstimateError, ValueError};
use crate::exec::ExecMode;
use crate::ext::ExtReal;
use crate::growth::{check_enough1, index_at, rsc, rsc_at, EstimatorConfig, ValueProcess};
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

use super::{draw_gamma, AssessorSource, InstanceGen, Property, TrialOutcome, Violation};

/// Tolerance for inequality chains on finite values.
pub const CHAIN_TOL: f64 = 1e-10;
/// Tolerance for the entropic identities and martingale inequalities.
pub const ENTROPIC_TOL: f64 = 1e-12;

type Found = Option<(Vec<usize>, f64)>;

fn gather(hits: impl Iterator<Item = (usize, f64)>) -> Found {
    let mut cells = BTreeSet::new();
    let mut worst = 0.0f64;
    for (c, m) in hits {
        cells.insert(c);
        worst = worst.max(m);
    }
    (!cells.is_empty()).then(|| (cells.into_iter().collect(), worst))
}

/// Entries `i` with `keep(i)` where `a` and `b` differ.
fn mismatch(a: &[ExtReal], b: &[ExtReal], cell_of: impl Fn(usize) -> usize, keep: impl Fn(usize) -> bool) -> Found {
    gather((0..a.len()).filter(|&i| keep(i) && a[i] != b[i]).map(|i| (cell_of(i), a[i].distance(b[i]))))
}

/// Entries `i` with `keep(i)` where `lhs >= rhs - tol` fails.
fn shortfall(
    lhs: &[ExtReal],
    rhs: &[ExtReal],
    tol: f64,
    cell_of: impl Fn(usize) -> usize,
    keep: impl Fn(usize) -> bool,
) -> Found {
    gather(
        (0..lhs.len())
            .filter(|&i| keep(i))
            .map(|i| (i, (rhs[i] - lhs[i]).get()))
            .filter(|&(_, d)| d > tol)
            .map(|(i, d)| (cell_of(i), d)),
    )
}

fn fail(t: usize, found: (Vec<usize>, f64), tolerance: f64, detail: impl Into<String>) -> TrialOutcome {
    TrialOutcome::Fail(Violation {
        t,
        s: None,
        horizon: None,
        cells: found.0,
        magnitude: found.1,
        tolerance,
        detail: detail.into(),
    })
}

fn with_s(mut out: TrialOutcome, s: usize) -> TrialOutcome {
    if let TrialOutcome::Fail(v) = &mut out {
        v.s = Some(s);
    }
    out
}

fn with_horizon(mut out: TrialOutcome, big_t: usize) -> TrialOutcome {
    if let TrialOutcome::Fail(v) = &mut out {
        v.horizon = Some(big_t);
    }
    out
}

fn space_err(e: crate::error::SpaceError) -> EstimateError {
    ValueError::from(e).into()
}

/// A random nonempty set of cells of `F_t`, all of them one time in eight.
fn random_cells(space: &FilteredSpace, t: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = space.cell_count(t);
    if rng.gen_bool(0.125) {
        return (0..n).collect();
    }
    let mut cells: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if cells.is_empty() {
        cells.push(rng.gen_range(0..n));
    }
    cells
}

/// Horizons checked by the per-horizon properties: every listed time past `t`,
/// a few steps into the linear tail, and some far horizons.
fn horizons(listed: usize, t: usize) -> Vec<usize> {
    let near = (t + 1)..=(listed + 3);
    let far = [10, 60, 500].into_iter();
    near.chain(far).filter(|&h| h > t).collect::<BTreeSet<_>>().into_iter().collect()
}

fn per_cell_keep(space: &FilteredSpace, t: usize, cells: &[usize]) -> Vec<bool> {
    let mut keep = vec![false; space.cell_count(t)];
    for &c in cells {
        keep[c] = true;
    }
    keep
}

/// `I_A mu_t(X) = I_A mu_t(Y)` whenever `X = Y` on `A in F_t`.
pub struct Local {
    pub src: AssessorSource,
}

impl Property for Local {
    fn name(&self) -> String {
        format!("local[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let space = gen.space(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=space.depth());
        let cells = random_cells(&space, t, rng);
        let ind = space.indicator(t, &cells).map_err(space_err)?;
        let x = gen.variable(&space, 5.0, rng);
        let elsewhere = if rng.gen_bool(0.5) {
            RandomVariable::constant(space.atom_count(), ExtReal::ZERO)
        } else {
            gen.variable(&space, 5.0, rng)
        };
        let y: RandomVariable =
            (0..space.atom_count()).map(|a| if ind[a] == ExtReal::ONE { x[a] } else { elsewhere[a] }).collect();
        let fx = mu.evaluate(&space, t, &x)?;
        let fy = mu.evaluate(&space, t, &y)?;
        let part = space.partition(t);
        Ok(match mismatch(fx.values(), fy.values(), |a| part.cell_of(a), |a| ind[a] == ExtReal::ONE) {
            Some(found) => fail(t, found, 0.0, format!("{} changes on A when X changes off A", mu.label())),
            None => TrialOutcome::Pass { tolerance: 0.0 },
        })
    }
}

/// `g_T(I_A ._t V) = g_T(V)` on `A in F_t`, normalized and not, per horizon.
pub struct IndexLocal {
    pub src: AssessorSource,
}

impl Property for IndexLocal {
    fn name(&self) -> String {
        format!("index_local[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=inst.listed);
        let cells = random_cells(&inst.space, t, rng);
        let ind = inst.space.indicator(t, &cells).map_err(space_err)?;
        let masked = inst.v.multiply_at(t, &ind)?;
        let keep = per_cell_keep(&inst.space, t, &cells);
        for big_t in horizons(inst.listed, t) {
            for normalized in [true, false] {
                let a = index_at(&inst.v, t, mu.as_ref(), big_t, normalized)?;
                let b = index_at(&masked, t, mu.as_ref(), big_t, normalized)?;
                if let Some(found) = mismatch(&a, &b, |c| c, |c| keep[c]) {
                    let what = if normalized { "normalized" } else { "un-normalized" };
                    return Ok(with_horizon(
                        fail(t, found, 0.0, format!("{what} index changes on A after masking")),
                        big_t,
                    ));
                }
            }
        }
        Ok(TrialOutcome::Pass { tolerance: 0.0 })
    }
}

/// `X <= Y` implies `mu_t(X) <= mu_t(Y)`.
pub struct Monotone {
    pub src: AssessorSource,
}

impl Property for Monotone {
    fn name(&self) -> String {
        format!("monotone[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let space = gen.space(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=space.depth());
        let x = gen.variable(&space, 5.0, rng);
        let zero = rng.gen_bool(0.25);
        let bump: RandomVariable = (0..space.atom_count())
            .map(|_| ExtReal::new(if zero || rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..3.0) }))
            .collect();
        let y = x.add(&bump);
        let fx = mu.evaluate(&space, t, &x)?;
        let fy = mu.evaluate(&space, t, &y)?;
        let part = space.partition(t);
        Ok(match shortfall(fy.values(), fx.values(), CHAIN_TOL, |a| part.cell_of(a), |_| true) {
            Some(found) => fail(t, found, CHAIN_TOL, format!("{} decreases when X increases", mu.label())),
            None => TrialOutcome::Pass { tolerance: CHAIN_TOL },
        })
    }
}

/// `V <= V'` implies `mu_t(ln V_T) / T <= mu_t(ln V'_T) / T` per horizon.
pub struct IndexMonotone {
    pub src: AssessorSource,
}

impl Property for IndexMonotone {
    fn name(&self) -> String {
        format!("index_monotone[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=inst.listed);
        let at = rng.gen_range(0..=inst.listed);
        let per_cell: Vec<ExtReal> = (0..inst.space.cell_count(at))
            .map(|_| ExtReal::new(if rng.gen_bool(0.25) { 1.0 } else { rng.gen_range(1.0..3.0) }))
            .collect();
        let bigger = inst.v.scale_at(at, &inst.space.broadcast(at, &per_cell))?;
        for big_t in horizons(inst.listed, t) {
            let lo = index_at(&inst.v, t, mu.as_ref(), big_t, false)?;
            let hi = index_at(&bigger, t, mu.as_ref(), big_t, false)?;
            if let Some(found) = shortfall(&hi, &lo, CHAIN_TOL, |c| c, |_| true) {
                return Ok(with_horizon(
                    fail(t, found, CHAIN_TOL, "un-normalized index decreases for a larger process"),
                    big_t,
                ));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: CHAIN_TOL })
    }
}

fn log_add_exp(a: ExtReal, b: ExtReal) -> ExtReal {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi.is_neg_inf() {
        return hi;
    }
    ExtReal::new(hi.get() + (lo.get() - hi.get()).exp().ln_1p())
}

/// Corrected finite-horizon quasi-concavity: for `F_t`-measurable
/// `lambda in (0, 1)`,
/// `mu_t(ln(lambda V_T + (1 - lambda) V'_T)) >= min(mu_t(ln lambda V_T), mu_t(ln (1 - lambda) V'_T))`,
/// written with `ln lambda` pulled out of `mu_t` when the assessor is cash additive.
pub struct Quasiconcave {
    pub src: AssessorSource,
}

impl Property for Quasiconcave {
    fn name(&self) -> String {
        format!("quasiconcave[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let space = &inst.space;
        let t = rng.gen_range(0..=inst.listed);
        let degenerate = rng.gen_bool(0.125);
        let (lambda, w) = if degenerate {
            (RandomVariable::constant(space.atom_count(), ExtReal::new(0.5)), inst.v.clone())
        } else {
            (gen.measurable(space, t, 0.01, 0.99, rng), inst.w.clone())
        };
        let ln_l = lambda.map(ExtReal::ln);
        let ln_r = lambda.map(|l| ExtReal::new(1.0 - l.get()).ln());
        let cash = mu.flags().cash_additive;
        for big_t in horizons(inst.listed, t) {
            let tf = big_t as f64;
            let a = inst.v.log_value(big_t)?;
            let b = w.log_value(big_t)?;
            let (a_l, b_r) = (a.add(&ln_l), b.add(&ln_r));
            let mix = a_l.zip_map(&b_r, log_add_exp);
            let eval = |x: &RandomVariable| -> Result<RandomVariable, EstimateError> {
                Ok(hat_eval(mu.as_ref(), space, t, x)?.value)
            };
            let lhs = eval(&mix)?.map(|v| v.div_scalar(tf));
            let (left, right) =
                if cash { (eval(&a)?.add(&ln_l), eval(&b)?.add(&ln_r)) } else { (eval(&a_l)?, eval(&b_r)?) };
            let rhs = left.zip_map(&right, ExtReal::min).map(|v| v.div_scalar(tf));
            let part = space.partition(t);
            if let Some(found) = shortfall(lhs.values(), rhs.values(), CHAIN_TOL, |i| part.cell_of(i), |_| true) {
                return Ok(with_horizon(
                    fail(t, found, CHAIN_TOL, "index of the mixture below the corrected minimum"),
                    big_t,
                ));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: CHAIN_TOL })
    }
}

fn gamma_of(mu: &dyn Assessor, rng: &mut impl Rng) -> f64 {
    mu.entropic_gamma().unwrap_or_else(|| draw_gamma(-2.0, 2.0, rng))
}

/// `g_T(beta ._t V) = g_T(V)` bit for bit, for `F_t`-measurable `beta > 0`.
/// Checked on the entropic fast path and on the generic index.
pub struct ScaleInvariance {
    pub src: AssessorSource,
    /// `false` checks the un-normalized index, which is not scale invariant.
    pub normalized: bool,
}

impl Property for ScaleInvariance {
    fn name(&self) -> String {
        let prefix = if self.normalized { "" } else { "unnormalized_" };
        format!("{prefix}scale_invariance[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let gamma = gamma_of(mu.as_ref(), rng);
        let space = &inst.space;
        let t = rng.gen_range(0..=inst.listed);
        let beta = match rng.gen_range(0..3) {
            0 => RandomVariable::constant(space.atom_count(), ExtReal::new(10.0)),
            1 => gen.measurable(space, t, 0.1, 10.0, rng),
            _ => {
                let per_cell: Vec<ExtReal> =
                    (0..space.cell_count(t)).map(|_| ExtReal::new(if rng.gen_bool(0.5) { 2.0 } else { 3.0 })).collect();
                space.broadcast(t, &per_cell)
            }
        };
        let scaled = inst.v.scale_at(t, &beta)?;
        for big_t in horizons(inst.listed, t) {
            if self.normalized {
                let a = rsc_at(&inst.v, t, gamma, big_t)?;
                let b = rsc_at(&scaled, t, gamma, big_t)?;
                if let Some(found) = mismatch(&a, &b, |c| c, |_| true) {
                    return Ok(with_horizon(
                        fail(t, found, 0.0, format!("rsc at gamma = {gamma} moved under scaling")),
                        big_t,
                    ));
                }
            }
            let a = index_at(&inst.v, t, mu.as_ref(), big_t, self.normalized)?;
            let b = index_at(&scaled, t, mu.as_ref(), big_t, self.normalized)?;
            if let Some(found) = mismatch(&a, &b, |c| c, |_| true) {
                return Ok(with_horizon(
                    fail(t, found, 0.0, format!("index under {} moved under scaling", mu.label())),
                    big_t,
                ));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: 0.0 })
    }
}

/// Changing `V_r` for `r < t` while keeping `V_T`, `T >= t`, leaves `g_T` at
/// `t` unchanged bit for bit.
pub struct IndependentOfPast {
    pub src: AssessorSource,
}

impl Property for IndependentOfPast {
    fn name(&self) -> String {
        format!("independent_of_past[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let gamma = gamma_of(mu.as_ref(), rng);
        let t = rng.gen_range(1..=inst.listed);
        let r = rng.gen_range(0..t);
        let m = gen.measurable(&inst.space, r, 0.2, 5.0, rng);
        let inv = m.map(|x| ExtReal::new(1.0 / x.get()));
        let changed = inst.v.scale_at(r, &m)?.scale_at(t, &inv)?;
        for big_t in horizons(inst.listed, t) {
            let a = rsc_at(&inst.v, t, gamma, big_t)?;
            let b = rsc_at(&changed, t, gamma, big_t)?;
            let c = index_at(&inst.v, t, mu.as_ref(), big_t, true)?;
            let d = index_at(&changed, t, mu.as_ref(), big_t, true)?;
            if let Some(found) = mismatch(&a, &b, |c| c, |_| true).or_else(|| mismatch(&c, &d, |c| c, |_| true)) {
                return Ok(with_horizon(fail(t, found, 0.0, format!("index depends on V_{r} before t")), big_t));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: 0.0 })
    }
}

/// `g_T` is nondecreasing in `gamma` at every horizon.
pub struct GammaMonotone {
    /// Evaluates at `-gamma`, which reverses the order.
    pub flipped: bool,
}

impl Property for GammaMonotone {
    fn name(&self) -> String {
        if self.flipped { "flipped_gamma_monotone" } else { "gamma_monotone" }.into()
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let t = rng.gen_range(0..=inst.listed);
        let mut grid: Vec<f64> = (0..4).map(|_| draw_gamma(-3.0, 3.0, rng)).collect();
        grid.push(0.0);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let sign = if self.flipped { -1.0 } else { 1.0 };
        for big_t in horizons(inst.listed, t) {
            let values = grid.iter().map(|&g| rsc_at(&inst.v, t, sign * g, big_t)).collect::<Result<Vec<_>, _>>()?;
            for (k, pair) in values.windows(2).enumerate() {
                if let Some(found) = shortfall(&pair[1], &pair[0], ENTROPIC_TOL, |c| c, |_| true) {
                    let detail = format!("g_T at gamma = {} exceeds g_T at gamma = {}", grid[k], grid[k + 1]);
                    return Ok(with_horizon(fail(t, found, ENTROPIC_TOL, detail), big_t));
                }
            }
        }
        Ok(TrialOutcome::Pass { tolerance: ENTROPIC_TOL })
    }
}

/// `mu_t(X + m) = mu_t(X) + m` for `F_t`-measurable `m`.
pub struct CashAdditive {
    pub src: AssessorSource,
}

impl Property for CashAdditive {
    fn name(&self) -> String {
        format!("cash_additive[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let space = gen.space(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=space.depth());
        let x = gen.variable(&space, 5.0, rng);
        let m = gen.measurable(&space, t, -5.0, 5.0, rng);
        let lhs = mu.evaluate(&space, t, &x.add(&m))?;
        let rhs = mu.evaluate(&space, t, &x)?.add(&m);
        let part = space.partition(t);
        let hits =
            (0..lhs.len()).map(|a| (part.cell_of(a), lhs[a].distance(rhs[a]))).filter(|&(_, d)| d > ENTROPIC_TOL);
        Ok(match gather(hits) {
            Some(found) => fail(t, found, ENTROPIC_TOL, format!("{} is not cash additive", mu.label())),
            None => TrialOutcome::Pass { tolerance: ENTROPIC_TOL },
        })
    }
}

/// Strong time consistency: `mu_s(X) >= mu_s(Y)` implies `mu_t(X) >= mu_t(Y)`.
/// `Y` is `mu_s(X)` minus a nonnegative `F_s`-measurable amount, so the premise
/// holds and, when nothing is subtracted, both directions give the recursion
/// `mu_t(mu_s(X)) = mu_t(X)`.
pub struct StrongTc {
    pub src: AssessorSource,
}

impl Property for StrongTc {
    fn name(&self) -> String {
        format!("strong_tc[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let space = gen.space(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..space.depth());
        let s = rng.gen_range(t + 1..=space.depth());
        let x = gen.variable(&space, 5.0, rng);
        let mu_s_x = mu.evaluate(&space, s, &x)?;
        let recursion = rng.gen_bool(0.5);
        let y = if recursion { mu_s_x.clone() } else { mu_s_x.sub(&gen.measurable(&space, s, 0.0, 2.0, rng)) };
        let mu_s_y = mu.evaluate(&space, s, &y)?;
        let mu_t_x = mu.evaluate(&space, t, &x)?;
        let mu_t_y = mu.evaluate(&space, t, &y)?;
        let part = space.partition(t);
        let holds = |a: &RandomVariable, b: &RandomVariable| {
            shortfall(a.values(), b.values(), ENTROPIC_TOL, |_| 0, |_| true).is_none()
        };
        let mut pairs = vec![(&mu_s_x, &mu_s_y, &mu_t_x, &mu_t_y)];
        if recursion {
            pairs.push((&mu_s_y, &mu_s_x, &mu_t_y, &mu_t_x));
        }
        for (ps, qs, pt, qt) in pairs {
            if !holds(ps, qs) {
                continue;
            }
            if let Some(found) = shortfall(pt.values(), qt.values(), ENTROPIC_TOL, |a| part.cell_of(a), |_| true) {
                let detail = format!(
                    "{}: ordered at s but not at t, Y = mu_s(X){}",
                    mu.label(),
                    if recursion { "" } else { " - Z" }
                );
                return Ok(with_s(fail(t, found, ENTROPIC_TOL, detail), s));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: ENTROPIC_TOL })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    /// `f_t >= E[f_s | F_t]`.
    Super,
    /// `f_t <= E[f_s | F_t]`.
    Sub,
}

impl Consistency {
    fn label(self) -> &'static str {
        match self {
            Consistency::Super => "supermartingale",
            Consistency::Sub => "submartingale",
        }
    }

    /// Entries where the inequality between `f_t` and `E[f_s | F_t]` fails by
    /// more than `tol`.
    fn violations(
        self,
        f_t: &[ExtReal],
        e_fs: &[ExtReal],
        tol: f64,
        cell_of: impl Fn(usize) -> usize,
        keep: impl Fn(usize) -> bool,
    ) -> Found {
        match self {
            Consistency::Super => shortfall(f_t, e_fs, tol, cell_of, keep),
            Consistency::Sub => shortfall(e_fs, f_t, tol, cell_of, keep),
        }
    }
}

/// Entropic assessors: `E[mu_s(X) | F_t] <= mu_t(X)` for `gamma >= 0` and the
/// reverse for `gamma <= 0`.
pub struct AssessorMartingale {
    pub kind: Consistency,
    pub gamma: (f64, f64),
}

impl Property for AssessorMartingale {
    fn name(&self) -> String {
        format!("assessor_{}[entropic([{}, {}])]", self.kind.label(), self.gamma.0, self.gamma.1)
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let space = gen.space(rng);
        let gamma = draw_gamma(self.gamma.0, self.gamma.1, rng);
        let mu = Entropic::new(gamma)?;
        let t = rng.gen_range(0..space.depth());
        let s = rng.gen_range(t + 1..=space.depth());
        let x = gen.variable(&space, 5.0, rng);
        let f_t = mu.evaluate(&space, t, &x)?;
        let e_fs = space.cond_expect(&mu.evaluate(&space, s, &x)?, t);
        let part = space.partition(t);
        Ok(match self.kind.violations(f_t.values(), e_fs.values(), ENTROPIC_TOL, |a| part.cell_of(a), |_| true) {
            Some(found) => with_s(fail(t, found, ENTROPIC_TOL, format!("entropic({gamma})")), s),
            None => TrialOutcome::Pass { tolerance: ENTROPIC_TOL },
        })
    }
}

/// Worst-case distance of the window minimum from the limit when every atom
/// grows linearly in log space from `listed` on: with
/// `ln V_T = a + b T`, `g_T` sits within `(|a| + |ln V_t| + |ln p_min| / |gamma|) / T`
/// of the essential sup, mean or inf of `b` over the cell.
pub fn linear_tail_error(
    v: &ValueProcess,
    t: usize,
    listed: usize,
    gamma: f64,
    t_min: usize,
) -> Result<f64, EstimateError> {
    let last = v.log_value(listed)?;
    let prev = v.log_value(listed - 1)?;
    let intercept = last
        .iter()
        .zip(prev.iter())
        .filter(|(l, _)| l.is_finite())
        .map(|(l, p)| (l.get() - listed as f64 * (l.get() - p.get())).abs())
        .fold(0.0, f64::max);
    let start = v.log_value(t)?.max_abs_finite();
    let p_min = v.space().probs().iter().copied().fold(1.0, f64::min);
    let spread = if gamma == 0.0 { 0.0 } else { p_min.ln().abs() / gamma.abs() };
    Ok((intercept + start + spread) / t_min as f64)
}

/// Compares the liminf estimates `phi_t` and `E[phi_s | F_t]` on the cells of
/// `F_t` where both converged. Inconclusive when no cell qualifies.
pub fn martingale_outcome(
    v: &ValueProcess,
    t: usize,
    s: usize,
    gamma: f64,
    cfg: &EstimatorConfig,
    kind: Consistency,
    tol: f64,
) -> Result<TrialOutcome, EstimateError> {
    let space = v.space();
    let phi_t = rsc(v, t, gamma, cfg)?;
    let phi_s = rsc(v, s, gamma, cfg)?;
    let e_phi_s = space.cell_representatives(t, &space.cond_expect(&phi_s.value(space), t));
    let part_s = space.partition(s);
    let part_t = space.partition(t);
    let usable: Vec<bool> = (0..part_t.cell_count())
        .map(|c| phi_t.converged[c] && part_t.cell(c).iter().all(|&a| phi_s.converged[part_s.cell_of(a)]))
        .collect();
    if !usable.iter().any(|&u| u) {
        return Ok(TrialOutcome::Inconclusive(format!("no converged cell at t = {t}, s = {s}")));
    }
    Ok(match kind.violations(&phi_t.cells, &e_phi_s, tol, |c| c, |c| usable[c]) {
        Some(found) => {
            let c = found.0[0];
            let detail = format!(
                "gamma = {gamma}: phi_t = {} against E[phi_s | F_t] = {} on cell {c}",
                phi_t.cells[c], e_phi_s[c]
            );
            with_s(fail(t, found, tol, detail), s)
        }
        None => TrialOutcome::Pass { tolerance: tol },
    })
}

/// Super- or submartingale consistency of the liminf estimates on strictly
/// positive processes, with the estimator tolerance of [`linear_tail_error`].
pub struct IndexMartingale {
    pub kind: Consistency,
    pub gamma: (f64, f64),
    pub cfg: EstimatorConfig,
}

impl IndexMartingale {
    pub fn new(kind: Consistency, gamma: (f64, f64)) -> Self {
        let cfg = EstimatorConfig { mode: ExecMode::Sequential, ..Default::default() };
        IndexMartingale { kind, gamma, cfg }
    }
}

impl Property for IndexMartingale {
    fn name(&self) -> String {
        format!("{}[rsc([{}, {}])]", self.kind.label(), self.gamma.0, self.gamma.1)
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let gen = InstanceGen { positive: true, ..gen.clone() };
        let inst = gen.instance(rng);
        let gamma = draw_gamma(self.gamma.0, self.gamma.1, rng);
        let (t, s) = (inst.t, inst.s);
        let t_min = self.cfg.window_start();
        let tol = linear_tail_error(&inst.v, t, inst.listed, gamma, t_min)?
            + linear_tail_error(&inst.v, s, inst.listed, gamma, t_min)?
            + ENTROPIC_TOL;
        martingale_outcome(&inst.v, t, s, gamma, &self.cfg, self.kind, tol)
    }
}

/// Equivalence of the two forms of time consistency on computed arrays: the
/// implication `f_s >= m_s => f_t >= E[m_s | F_t]` over the canonical
/// `m_s = f_s` and random alternatives holds exactly when
/// `f_t >= E[f_s | F_t]` does, and likewise for the submartingale form.
/// The arrays are entropic assessments or per-horizon indices.
pub struct TcEquivalence {
    pub gamma: (f64, f64),
    /// Replaces `E[. | F_t]` by its negative, which breaks the equivalence.
    pub negated_expectation: bool,
}

impl Property for TcEquivalence {
    fn name(&self) -> String {
        let prefix = if self.negated_expectation { "negated_" } else { "" };
        format!("{prefix}tc_equivalence[entropic([{}, {}])]", self.gamma.0, self.gamma.1)
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let space = &inst.space;
        let gamma = draw_gamma(self.gamma.0, self.gamma.1, rng);
        let (t, s) = (inst.t, inst.s);
        let (f_t, f_s) = if rng.gen_bool(0.5) {
            let mu = Entropic::new(gamma)?;
            let x = gen.variable(space, 5.0, rng);
            (mu.evaluate(space, t, &x)?, mu.evaluate(space, s, &x)?)
        } else {
            let big_t = rng.gen_range(s + 1..=inst.listed + 5);
            let at = |u: usize| -> Result<RandomVariable, EstimateError> {
                Ok(space.broadcast(u, &rsc_at(&inst.v, u, gamma, big_t)?))
            };
            (at(t)?, at(s)?)
        };
        let cond = |m: &RandomVariable| {
            let e = space.cond_expect(m, t);
            if self.negated_expectation {
                e.map(|v| -v)
            } else {
                e
            }
        };
        let all_ge = |a: &RandomVariable, b: &RandomVariable| a.iter().zip(b.iter()).all(|(x, y)| x >= y);
        let noise = |rng: &mut ChaCha8Rng, lo: f64| gen.measurable(space, s, lo, 3.0, rng);
        let mut candidates = vec![f_s.clone()];
        for _ in 0..4 {
            candidates.push(f_s.sub(&noise(rng, 0.0)));
        }
        for _ in 0..2 {
            candidates.push(f_s.add(&noise(rng, -3.0)));
        }
        let e_fs = cond(&f_s);
        for kind in [Consistency::Super, Consistency::Sub] {
            let inequality = match kind {
                Consistency::Super => all_ge(&f_t, &e_fs),
                Consistency::Sub => all_ge(&e_fs, &f_t),
            };
            let implication = candidates.iter().enumerate().all(|(k, m)| {
                // the submartingale form uses m_s = f_s plus the noise instead
                let m = if kind == Consistency::Sub && k > 0 { f_s.add(&f_s.sub(m)) } else { m.clone() };
                let (premise, conclusion) = match kind {
                    Consistency::Super => (all_ge(&f_s, &m), all_ge(&f_t, &cond(&m))),
                    Consistency::Sub => (all_ge(&m, &f_s), all_ge(&cond(&m), &f_t)),
                };
                !premise || conclusion
            });
            if inequality != implication {
                let detail = format!(
                    "{} inequality {} but implication form {} (gamma = {gamma})",
                    kind.label(),
                    if inequality { "holds" } else { "fails" },
                    if implication { "holds" } else { "fails" }
                );
                return Ok(with_s(fail(t, (Vec::new(), 1.0), 0.0, detail), s));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: 0.0 })
    }
}

/// Normalized and un-normalized liminf estimates differ by at most
/// `max |ln V_t| / (t_max - window)` on converged cells.
pub struct Enough1 {
    pub src: AssessorSource,
}

impl Property for Enough1 {
    fn name(&self) -> String {
        format!("enough1[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let gen = InstanceGen { positive: true, ..gen.clone() };
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=inst.listed);
        let cfg = EstimatorConfig { t_max: 1000, window: 50, tol: 1e-3, mode: ExecMode::Sequential };
        let report = check_enough1(&inst.v, t, mu.as_ref(), &cfg)?;
        let checked =
            (0..report.gap.len()).filter(|&c| report.normalized.converged[c] && report.unnormalized.converged[c]);
        if checked.clone().count() == 0 {
            return Ok(TrialOutcome::Inconclusive(format!("no converged cell at t = {t}")));
        }
        let tol = report.bound + 1e-12 * (1.0 + report.bound);
        Ok(match gather(checked.filter(|&c| report.gap[c] > tol).map(|c| (c, report.gap[c] - report.bound))) {
            Some(found) => fail(t, found, tol, format!("{}: gap above max |ln V_t| / (t_max - window)", mu.label())),
            None => TrialOutcome::Pass { tolerance: tol },
        })
    }
}

/// On bounded inputs the truncation limit equals the direct evaluation.
pub struct HatExtensionCheck {
    pub src: AssessorSource,
}

impl Property for HatExtensionCheck {
    fn name(&self) -> String {
        format!("hat_extension[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let space = gen.space(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..=space.depth());
        let x = gen.variable(&space, 10.0, rng);
        let direct = mu.evaluate(&space, t, &x)?;
        let hat = hat_schedule(mu.as_ref(), &space, t, &x)?;
        let part = space.partition(t);
        Ok(match mismatch(direct.values(), hat.value.values(), |a| part.cell_of(a), |_| true) {
            Some(found) => fail(t, found, 0.0, format!("{}: truncation limit differs on a bounded input", mu.label())),
            None if !hat.all_converged() => TrialOutcome::Inconclusive("schedule did not settle".into()),
            None => TrialOutcome::Pass { tolerance: 0.0 },
        })
    }
}

/// Adding `m` to `V` at a single time `k > t` or at `s > t` gives the same
/// `g_T` at `t` for every `T > max(k, s)`, bit for bit.
pub struct TranslationInvariance {
    pub src: AssessorSource,
}

impl Property for TranslationInvariance {
    fn name(&self) -> String {
        format!("translation_invariance[{}]", self.src.label())
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let gen = InstanceGen { positive: true, ..gen.clone() };
        let inst = gen.instance(rng);
        let mu = self.src.draw(rng);
        let t = rng.gen_range(0..inst.listed);
        let (k, s) = (rng.gen_range(t + 1..=inst.listed), rng.gen_range(t + 1..=inst.listed));
        let m = gen.measurable(&inst.space, t, 0.0, 2.0, rng);
        // listed far enough that the linear tail is read off untouched times
        let upto = inst.listed + 3;
        let base = (0..=upto).map(|u| inst.v.value(u)).collect::<Result<Vec<_>, _>>()?;
        let bumped = |at: usize| -> Result<ValueProcess, EstimateError> {
            let mut values = base.clone();
            values[at] = values[at].add(&m);
            Ok(ValueProcess::from_values(inst.space.clone(), values, crate::growth::ValueTail::Geometric)?)
        };
        let (vk, vs) = (bumped(k)?, bumped(s)?);
        for big_t in horizons(inst.listed, k.max(s)) {
            for normalized in [true, false] {
                let a = index_at(&vk, t, mu.as_ref(), big_t, normalized)?;
                let b = index_at(&vs, t, mu.as_ref(), big_t, normalized)?;
                if let Some(found) = mismatch(&a, &b, |c| c, |_| true) {
                    let detail = format!("adding m at {k} and at {s} disagree");
                    return Ok(with_horizon(fail(t, found, 0.0, detail), big_t));
                }
            }
        }
        Ok(TrialOutcome::Pass { tolerance: 0.0 })
    }
}

/// The entropic fast path agrees with the generic index under the entropic
/// assessor at every horizon.
pub struct RscFastPath;

impl Property for RscFastPath {
    fn name(&self) -> String {
        "rsc_fast_path".into()
    }

    fn trial(&self, gen: &InstanceGen, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimateError> {
        let inst = gen.instance(rng);
        let gamma = draw_gamma(-2.0, 2.0, rng);
        let mu = Entropic::new(gamma)?;
        let t = rng.gen_range(0..=inst.listed);
        for big_t in horizons(inst.listed, t) {
            let fast = rsc_at(&inst.v, t, gamma, big_t)?;
            let generic = index_at(&inst.v, t, &mu, big_t, true)?;
            let hits = (0..fast.len()).map(|c| (c, fast[c].distance(generic[c]))).filter(|&(_, d)| d > ENTROPIC_TOL);
            if let Some(found) = gather(hits) {
                return Ok(with_horizon(fail(t, found, ENTROPIC_TOL, format!("gamma = {gamma}")), big_t));
            }
        }
        Ok(TrialOutcome::Pass { tolerance: ENTROPIC_TOL })
    }
}
