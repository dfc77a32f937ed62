//! Processes with i.i.d. log-returns: `ln V_T = ln v0 + sum of T steps`.
//!
//! The entropic index of such a process is `(T - t) kappa / T` with
//! `kappa = (1/gamma) ln E[exp(gamma step)]`, so nothing is ever expanded
//! into the `K^T`-atom tree except by [`iid_tree`], which exists for
//! cross-checks at small depth.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::ValueError;
use crate::ext::ExtReal;
use crate::numeric::{exact_sum, log_mean_exp};
use crate::process::AdaptedProcess;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

use super::value::ValueProcess;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPoint {
    pub x: f64,
    pub p: f64,
}

/// Finite distribution of a one-period log-return.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<StepPoint>", into = "Vec<StepPoint>")]
pub struct StepDistribution {
    xs: Vec<f64>,
    ps: Vec<f64>,
}

/// How a continuous law is reduced to equal-probability points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantization {
    /// Conditional mean of each of the `K` equal-mass bins.
    Centroid,
    /// Quantile at the bin's mid probability, `(j + 1/2) / K`.
    MidQuantile,
}

impl StepDistribution {
    pub fn new(xs: Vec<f64>, ps: Vec<f64>) -> Result<Self, ValueError> {
        let bad = |m: String| Err(ValueError::BadDistribution(m));
        if xs.is_empty() || xs.len() != ps.len() {
            return bad(format!("{} points with {} probabilities", xs.len(), ps.len()));
        }
        if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
            return bad(format!("step {x} is not finite"));
        }
        if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return bad(format!("probability {p} outside (0, 1]"));
        }
        let total = exact_sum(ps.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("probabilities sum to {total}"));
        }
        Ok(StepDistribution { xs, ps })
    }

    /// `+sigma` or `-sigma` with probability 1/2 each.
    pub fn binomial(sigma: f64) -> Result<Self, ValueError> {
        Self::new(vec![sigma, -sigma], vec![0.5, 0.5])
    }

    /// `k` equal-probability points approximating `N(0, 1)`, mirrored so that
    /// the grid is exactly symmetric.
    pub fn standard_normal(k: usize, quantization: Quantization) -> Result<Self, ValueError> {
        if k == 0 {
            return Err(ValueError::BadDistribution("need at least one point".into()));
        }
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let kf = k as f64;
        let mut xs = vec![0.0; k];
        for j in 0..k / 2 {
            let x = match quantization {
                Quantization::MidQuantile => normal.inverse_cdf((j as f64 + 0.5) / kf),
                Quantization::Centroid => {
                    let a = if j == 0 { 0.0 } else { normal.pdf(normal.inverse_cdf(j as f64 / kf)) };
                    let b = normal.pdf(normal.inverse_cdf((j as f64 + 1.0) / kf));
                    kf * (a - b)
                }
            };
            xs[j] = x;
            xs[k - 1 - j] = -x;
        }
        Self::new(xs, vec![1.0 / kf; k])
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

impl TryFrom<Vec<StepPoint>> for StepDistribution {
    type Error = ValueError;

    fn try_from(points: Vec<StepPoint>) -> Result<Self, ValueError> {
        Self::new(points.iter().map(|s| s.x).collect(), points.iter().map(|s| s.p).collect())
    }
}

impl From<StepDistribution> for Vec<StepPoint> {
    fn from(d: StepDistribution) -> Self {
        d.xs.into_iter().zip(d.ps).map(|(x, p)| StepPoint { x, p }).collect()
    }
}

/// Per-step entropic cumulant `(1/gamma) ln sum p e^{gamma x}`, or the mean
/// at `gamma = 0`: the exact, time-constant value of the risk sensitive
/// criterion for the i.i.d. process.
pub fn iid_rsc_closed_form(step: &StepDistribution, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return exact_sum(step.xs.iter().zip(&step.ps).map(|(x, p)| x * p));
    }
    let ys: Vec<f64> = step.xs.iter().map(|x| gamma * x).collect();
    log_mean_exp(&step.ps, &ys) / gamma
}

/// `g_T = (T - t) kappa / T` for the i.i.d. process.
pub fn iid_horizon_value(kappa: f64, t: usize, big_t: usize) -> f64 {
    (big_t - t) as f64 * kappa / big_t as f64
}

/// The full `K^depth` tree: atom `j` spells its path in base `K`, most
/// significant digit first, and `F_t` groups atoms by their first `t` steps.
/// Past `depth` the process holds its last value.
pub fn iid_tree(step: &StepDistribution, v0: f64, depth: usize) -> Result<ValueProcess, ValueError> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(ValueError::BadDistribution(format!("v0 = {v0} must be positive")));
    }
    let k = step.len();
    let n = k
        .checked_pow(depth as u32)
        .filter(|&n| n <= 1 << 22)
        .ok_or_else(|| ValueError::BadDistribution(format!("{k}^{depth} atoms is too many to enumerate")))?;
    let digits = |j: usize| -> Vec<usize> {
        let mut d = vec![0; depth];
        let mut r = j;
        for slot in d.iter_mut().rev() {
            *slot = r % k;
            r /= k;
        }
        d
    };
    let paths: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let probs: Vec<f64> = paths.iter().map(|d| d.iter().map(|&i| step.ps[i]).product()).collect();
    let total: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
    let partitions: Vec<Vec<Vec<usize>>> = (0..=depth)
        .map(|t| {
            let width = k.pow((depth - t) as u32);
            (0..n / width).map(|c| (c * width..(c + 1) * width).collect()).collect()
        })
        .collect();
    let ids = (0..n).map(|j| format!("w{j}")).collect();
    let space = Arc::new(FilteredSpace::from_indices(ids, probs, partitions)?);
    let ln_v0 = v0.ln();
    let logs: Vec<RandomVariable> = (0..=depth)
        .map(|t| paths.iter().map(|d| ExtReal::new(ln_v0 + d[..t].iter().map(|&i| step.xs[i]).sum::<f64>())).collect())
        .collect();
    ValueProcess::from_log(space, AdaptedProcess::explicit(logs, crate::process::TailRule::Hold), depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::ExecMode;
    use crate::growth::rsc_horizon_seq;

    #[test]
    fn binomial_is_log_cosh() {
        for sigma in [0.5, 1.0] {
            let d = StepDistribution::binomial(sigma).unwrap();
            for g in [-1.0, -0.5, 0.5, 1.0] {
                let want = (g * sigma).cosh().ln() / g;
                assert!((iid_rsc_closed_form(&d, g) - want).abs() < 1e-12);
            }
            assert_eq!(iid_rsc_closed_form(&d, 0.0), 0.0);
        }
    }

    #[test]
    fn tree_matches_closed_form_per_horizon() {
        let d = StepDistribution::new(vec![0.4, -0.1, -0.3], vec![0.2, 0.5, 0.3]).unwrap();
        let v = iid_tree(&d, 2.0, 4).unwrap();
        for g in [-1.5, 0.0, 0.8] {
            let kappa = iid_rsc_closed_form(&d, g);
            for t in 0..4 {
                let seq = rsc_horizon_seq(&v, t, g, 4, ExecMode::Sequential).unwrap();
                for (h, cells) in seq.horizons.iter().zip(&seq.cells) {
                    for c in cells {
                        assert!((c.get() - iid_horizon_value(kappa, t, *h)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn normal_grids_are_symmetric() {
        for q in [Quantization::Centroid, Quantization::MidQuantile] {
            let d = StepDistribution::standard_normal(401, q).unwrap();
            assert_eq!(d.xs()[200], 0.0);
            for j in 0..200 {
                assert_eq!(d.xs()[j], -d.xs()[400 - j]);
            }
            assert_eq!(iid_rsc_closed_form(&d, 0.0), 0.0);
        }
    }

    #[test]
    fn quantization_error() {
        let centroid = StepDistribution::standard_normal(401, Quantization::Centroid).unwrap();
        let mid = StepDistribution::standard_normal(401, Quantization::MidQuantile).unwrap();
        for g in [-1.0, -0.5, 0.5, 1.0] {
            assert!((iid_rsc_closed_form(&centroid, g) - g / 2.0).abs() <= 2e-3);
        }
        // the mid-quantile grid overshoots the tails
        let err = (iid_rsc_closed_form(&mid, 1.0) - 0.5).abs();
        assert!(err > 2e-3 && err < 6e-3, "{err}");
    }

    #[test]
    fn bad_distributions() {
        assert!(StepDistribution::new(vec![1.0], vec![0.9]).is_err());
        assert!(StepDistribution::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(StepDistribution::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(StepDistribution::new(vec![1.0, 2.0], vec![1.5, -0.5]).is_err());
        let json = r#"[{"x":0.5,"p":0.5},{"x":-0.5,"p":0.5}]"#;
        let d: StepDistribution = serde_json::from_str(json).unwrap();
        assert_eq!(d, StepDistribution::binomial(0.5).unwrap());
        assert!(serde_json::from_str::<StepDistribution>(r#"[{"x":1,"p":0.3}]"#).is_err());
    }
}
