use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ext::ExtReal;
use crate::growth::ValueProcess;
use crate::process::{AdaptedProcess, TailRule};
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

/// Parameters for random finite filtered spaces and value processes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceGen {
    pub seed: u64,
    /// At most 4.
    pub max_depth: usize,
    /// At most 3.
    pub max_branching: usize,
    /// Listed times past the space depth; the log value then grows linearly.
    pub extra_steps: usize,
    /// Log increments are uniform in `[-step, step]`.
    pub step: f64,
    /// Only strictly positive processes.
    pub positive: bool,
    /// Per cell and time, the chance that the process drops to zero.
    pub absorption: f64,
}

impl Default for InstanceGen {
    fn default() -> Self {
        InstanceGen {
            seed: 0,
            max_depth: 4,
            max_branching: 3,
            extra_steps: 2,
            step: 1.0,
            positive: true,
            absorption: 0.0,
        }
    }
}

/// A random space with two value processes on it and a pair of times.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: Arc<FilteredSpace>,
    pub v: ValueProcess,
    pub w: ValueProcess,
    /// Last explicitly listed time of `v` and `w`.
    pub listed: usize,
    pub t: usize,
    pub s: usize,
}

impl InstanceGen {
    pub fn with_seed(seed: u64) -> Self {
        InstanceGen { seed, ..Default::default() }
    }

    /// Independent stream for one trial.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    pub fn space(&self, rng: &mut impl Rng) -> Arc<FilteredSpace> {
        let depth = rng.gen_range(1..=self.max_depth.clamp(1, 4));
        let max_b = self.max_branching.clamp(2, 3);
        // paths grow one level at a time, children stay contiguous
        let mut nodes: Vec<(f64, Vec<usize>)> = vec![(1.0, Vec::new())];
        for level in 0..depth {
            let mut next = Vec::new();
            for (p, path) in &nodes {
                let b = if level == 0 { rng.gen_range(2..=max_b) } else { rng.gen_range(1..=max_b) };
                let w: Vec<f64> = (0..b).map(|_| rng.gen_range(0.2..1.0)).collect();
                let total: f64 = w.iter().sum();
                for (i, wi) in w.iter().enumerate() {
                    let mut child = path.clone();
                    child.push(i);
                    next.push((p * wi / total, child));
                }
            }
            nodes = next;
        }
        let partitions = (0..=depth)
            .map(|t| {
                let mut cells: Vec<Vec<usize>> = Vec::new();
                for (a, (_, path)) in nodes.iter().enumerate() {
                    let starts_new = a == 0 || nodes[a - 1].1[..t] != path[..t];
                    if starts_new {
                        cells.push(Vec::new());
                    }
                    cells.last_mut().expect("cell opened").push(a);
                }
                cells
            })
            .collect();
        let ids = (0..nodes.len()).map(|a| format!("a{a}")).collect();
        let probs = nodes.iter().map(|(p, _)| *p).collect();
        Arc::new(FilteredSpace::from_indices(ids, probs, partitions).expect("generated space is valid"))
    }

    /// Uniform in `[lo, hi)` on each cell of `F_t`.
    pub fn measurable(&self, space: &FilteredSpace, t: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> RandomVariable {
        let per_cell: Vec<ExtReal> = (0..space.cell_count(t)).map(|_| ExtReal::new(rng.gen_range(lo..hi))).collect();
        space.broadcast(t, &per_cell)
    }

    /// Finite values uniform in `[-range, range)` per atom.
    pub fn variable(&self, space: &FilteredSpace, range: f64, rng: &mut impl Rng) -> RandomVariable {
        (0..space.atom_count()).map(|_| ExtReal::new(rng.gen_range(-range..range))).collect()
    }

    /// Log values listed up to `listed`, continued linearly.
    pub fn process(&self, space: &Arc<FilteredSpace>, listed: usize, rng: &mut impl Rng) -> ValueProcess {
        let n = space.atom_count();
        let v0 = ExtReal::new(rng.gen_range(-1.0..1.0));
        let mut logs = vec![RandomVariable::constant(n, v0)];
        for t in 1..=listed {
            let level = t.min(space.depth());
            let step = self.measurable(space, level, -self.step, self.step, rng);
            let mut next = logs[t - 1].add(&step).into_values();
            if !self.positive && self.absorption > 0.0 {
                let part = space.partition(level);
                for c in 0..part.cell_count() {
                    if rng.gen_bool(self.absorption) {
                        for &a in part.cell(c) {
                            next[a] = ExtReal::NEG_INF;
                        }
                    }
                }
            }
            logs.push(RandomVariable::new(next));
        }
        ValueProcess::from_log(space.clone(), AdaptedProcess::explicit(logs, TailRule::Linear), listed + 1)
            .expect("generated process is valid")
    }

    pub fn instance(&self, rng: &mut impl Rng) -> Instance {
        let space = self.space(rng);
        let listed = space.depth() + self.extra_steps;
        let v = self.process(&space, listed, rng);
        let w = self.process(&space, listed, rng);
        let t = rng.gen_range(0..space.depth());
        let s = rng.gen_range(t + 1..=space.depth());
        Instance { space, v, w, listed, t, s }
    }
}
