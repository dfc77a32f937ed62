//! The worked example and the counterexample processes.

use std::sync::Arc;

use crate::error::{SpaceError, ValueError};
use crate::ext::ExtReal;
use crate::growth::ValueProcess;
use crate::process::AdaptedProcess;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

/// `V_T = exp(T E[X | F_min(T, D)])` on the dyadic space of depth `D`, with
/// `X` the atom midpoint.
pub fn dyadic_vhat(depth: usize) -> Result<ValueProcess, ValueError> {
    if depth < 2 {
        return Err(SpaceError::ZeroDepth.into());
    }
    let space = Arc::new(FilteredSpace::dyadic(depth)?);
    let n = space.atom_count();
    let log = AdaptedProcess::generated(move |big_t| {
        let s = big_t.min(depth);
        let denom = (1u64 << (s + 1)) as f64;
        let tf = big_t as f64;
        (0..n)
            .map(|j| {
                let cell = j >> (depth - s);
                ExtReal::new(tf * (2 * cell + 1) as f64 / denom)
            })
            .collect::<RandomVariable>()
    });
    ValueProcess::from_log(space, log, depth + 1)
}

/// Number of grid atoms lying inside `[0, 1/T]`.
pub fn shrinking_set_len(grid: usize, big_t: usize) -> usize {
    grid / big_t.max(1)
}

/// Process on the uniform grid whose log value is `inside(T)` on the atoms
/// covering `[0, 1/T]` and `outside(T)` elsewhere, with `V_0 = 1`. Horizons
/// past the grid size are rejected since the set is no longer a union of atoms.
pub fn split_process(grid: usize, inside: fn(f64) -> f64, outside: fn(f64) -> f64) -> Result<ValueProcess, ValueError> {
    let space = Arc::new(FilteredSpace::uniform_grid(grid)?);
    let log = AdaptedProcess::generated(move |big_t| {
        if big_t == 0 {
            return RandomVariable::constant(grid, ExtReal::ZERO);
        }
        let k = shrinking_set_len(grid, big_t);
        let tf = big_t as f64;
        (0..grid).map(|j| ExtReal::new(if j < k { inside(tf) } else { outside(tf) })).collect()
    });
    // adaptedness only matters at t = 0; F_1 already separates every atom
    Ok(ValueProcess::from_log(space, log, 2)?.with_max_horizon(grid))
}

/// `V_T = 1/T` on `[0, 1/T]`, `e^T` elsewhere.
pub fn notacc(grid: usize) -> Result<ValueProcess, ValueError> {
    split_process(grid, |t| -t.ln(), |t| t)
}

/// `V_T = T e^T` on `[0, 1/T]`, `1` elsewhere.
pub fn notrej(grid: usize) -> Result<ValueProcess, ValueError> {
    split_process(grid, |t| t.ln() + t, |_| 0.0)
}

/// `V_T = e^{-T^2}` on `[0, 1/T]`, `e^T` elsewhere.
pub fn gamma0_a(grid: usize) -> Result<ValueProcess, ValueError> {
    split_process(grid, |t| -t * t, |t| t)
}

/// `V_T = e^{T^2}` on `[0, 1/T]`, `1` elsewhere.
pub fn gamma0_b(grid: usize) -> Result<ValueProcess, ValueError> {
    split_process(grid, |t| t * t, |_| 0.0)
}
