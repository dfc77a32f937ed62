//! Execution strategy for the data-parallel loops (horizon sweeps, trial
//! campaigns, scenario grids).
//!
//! With the `parallel` feature the [`ExecMode::Parallel`] strategy runs on
//! rayon's pool; without it every mode degrades to the sequential loop.
//! Results are always returned in input order.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

impl ExecMode {
    pub fn map_range<R, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => {
                use rayon::prelude::*;
                range.into_par_iter().map(f).collect()
            }
            _ => range.map(f).collect(),
        }
    }

    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let seq = ExecMode::Sequential.map_range(0..1000, |i| i * i);
        let par = ExecMode::Parallel.map_range(0..1000, |i| i * i);
        assert_eq!(seq, par);
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(ExecMode::Parallel.map_slice(&xs, |x| x + 1), (1..51).collect::<Vec<_>>());
    }
}
