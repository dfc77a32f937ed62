//! Finite filtered probability spaces.
//!
//! A space is a list of atoms with strictly positive probabilities and a
//! refining sequence of partitions `F_0, ..., F_D`. `F_0` is the trivial
//! partition and queries past `D` use `F_D`, so every horizon is defined.
//!
//! Conditional expectations and every assessor in the crate are computed
//! cell by cell through [`FilteredSpace::apply_cells`], which is what makes
//! them local by construction.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::SpaceError;
use crate::ext::ExtReal;
use crate::numeric::weighted_mean;
use crate::variable::RandomVariable;

const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
    cell_prob: Vec<f64>,
}

impl Partition {
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, i: usize) -> &[usize] {
        &self.cells[i]
    }

    pub fn cell_of(&self, atom: usize) -> usize {
        self.cell_of[atom]
    }

    pub fn cell_prob(&self, i: usize) -> f64 {
        self.cell_prob[i]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilteredSpace {
    ids: Vec<String>,
    probs: Vec<f64>,
    partitions: Vec<Partition>,
}

/// One atom of a space file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub id: String,
    pub p: f64,
}

/// JSON layout of a space file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub atoms: Vec<AtomSpec>,
    pub partitions: Vec<Vec<Vec<String>>>,
}

impl FilteredSpace {
    /// Validates atoms and partitions given by atom id.
    pub fn build(atoms: &[AtomSpec], partitions: &[Vec<Vec<String>>]) -> Result<Self, SpaceError> {
        if atoms.is_empty() {
            return Err(SpaceError::NoAtoms);
        }
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.id.as_str(), i).is_some() {
                return Err(SpaceError::NotAPartition { t: 0, reason: format!("duplicate atom id {:?}", a.id) });
            }
        }
        let mut by_index = Vec::with_capacity(partitions.len());
        for (t, part) in partitions.iter().enumerate() {
            let mut cells = Vec::with_capacity(part.len());
            for cell in part {
                let mut ids = Vec::with_capacity(cell.len());
                for id in cell {
                    let &i = index
                        .get(id.as_str())
                        .ok_or_else(|| SpaceError::NotAPartition { t, reason: format!("unknown atom id {id:?}") })?;
                    ids.push(i);
                }
                cells.push(ids);
            }
            by_index.push(cells);
        }
        let ids = atoms.iter().map(|a| a.id.clone()).collect();
        let probs = atoms.iter().map(|a| a.p).collect();
        Self::from_indices(ids, probs, by_index)
    }

    pub fn from_file(file: &SpaceFile) -> Result<Self, SpaceError> {
        Self::build(&file.atoms, &file.partitions)
    }

    /// Same validation as [`FilteredSpace::build`], with cells given as atom indices.
    pub fn from_indices(
        ids: Vec<String>,
        probs: Vec<f64>,
        partitions: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, SpaceError> {
        let n = probs.len();
        if n == 0 {
            return Err(SpaceError::NoAtoms);
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p > 0.0 && **p <= 1.0)) {
            return Err(SpaceError::BadProbabilities(format!("atom {i} has probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(SpaceError::BadProbabilities(format!("probabilities sum to {total}")));
        }
        if partitions.is_empty() {
            return Err(SpaceError::NoPartitions);
        }
        if partitions[0].len() != 1 {
            return Err(SpaceError::NonTrivialRoot(partitions[0].len()));
        }

        let mut built: Vec<Partition> = Vec::with_capacity(partitions.len());
        for (t, cells) in partitions.into_iter().enumerate() {
            let mut cell_of = vec![usize::MAX; n];
            for (c, cell) in cells.iter().enumerate() {
                if cell.is_empty() {
                    return Err(SpaceError::NotAPartition { t, reason: format!("cell {c} is empty") });
                }
                for &a in cell {
                    if a >= n {
                        return Err(SpaceError::NotAPartition { t, reason: format!("atom index {a} out of range") });
                    }
                    if cell_of[a] != usize::MAX {
                        return Err(SpaceError::NotAPartition { t, reason: format!("atom {a} appears twice") });
                    }
                    cell_of[a] = c;
                }
            }
            if let Some(a) = cell_of.iter().position(|&c| c == usize::MAX) {
                return Err(SpaceError::NotAPartition { t, reason: format!("atom {a} is not covered") });
            }
            if let Some(prev) = built.last() {
                for cell in &cells {
                    let parent = prev.cell_of[cell[0]];
                    if cell.iter().any(|&a| prev.cell_of[a] != parent) {
                        return Err(SpaceError::NonRefining { t });
                    }
                }
            }
            let cell_prob = cells.iter().map(|cell| cell.iter().map(|&a| probs[a]).sum()).collect();
            built.push(Partition { cells, cell_of, cell_prob });
        }
        Ok(FilteredSpace { ids, probs, partitions: built })
    }

    /// `[0, 1]` with Lebesgue measure cut into `2^depth` dyadic atoms. The
    /// partition at `t` has `2^t` cells, cell `i` holding the atoms of
    /// `[i 2^-t, (i + 1) 2^-t)`.
    pub fn dyadic(depth: usize) -> Result<Self, SpaceError> {
        if depth == 0 {
            return Err(SpaceError::ZeroDepth);
        }
        let n = 1usize << depth;
        let ids = (0..n).map(|j| format!("d{j}")).collect();
        let probs = vec![1.0 / n as f64; n];
        let partitions = (0..=depth)
            .map(|t| {
                let width = 1usize << (depth - t);
                (0..(1usize << t)).map(|i| (i * width..(i + 1) * width).collect()).collect()
            })
            .collect();
        Self::from_indices(ids, probs, partitions)
    }

    /// `n` equal atoms on `[0, 1]`, trivial `F_0`, and `F_1` generated by the
    /// atoms (stationary afterwards).
    pub fn uniform_grid(n: usize) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::NoAtoms);
        }
        let ids = (0..n).map(|j| format!("g{j}")).collect();
        let probs = vec![1.0 / n as f64; n];
        let partitions = vec![vec![(0..n).collect()], (0..n).map(|j| vec![j]).collect()];
        Self::from_indices(ids, probs, partitions)
    }

    pub fn atom_count(&self) -> usize {
        self.probs.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Depth `D` after which the filtration is stationary.
    pub fn depth(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn partition(&self, t: usize) -> &Partition {
        &self.partitions[t.min(self.depth())]
    }

    pub fn cell_count(&self, t: usize) -> usize {
        self.partition(t).cell_count()
    }

    pub fn check_len(&self, x: &RandomVariable) -> Result<(), SpaceError> {
        if x.len() == self.atom_count() {
            Ok(())
        } else {
            Err(SpaceError::LengthMismatch { expected: self.atom_count(), got: x.len() })
        }
    }

    /// Constant on every cell of `F_t` (exact comparison of stored values).
    pub fn is_measurable(&self, x: &RandomVariable, t: usize) -> bool {
        self.partition(t).cells().iter().all(|cell| cell.iter().all(|&a| x[a] == x[cell[0]]))
    }

    /// Applies `f(probabilities, values)` on each cell of `F_t` and spreads the
    /// result over the cell's atoms.
    pub fn apply_cells<F>(&self, t: usize, x: &RandomVariable, f: F) -> RandomVariable
    where
        F: Fn(&[f64], &[ExtReal]) -> ExtReal,
    {
        let per_cell = self.reduce_cells(t, x, f);
        self.broadcast(t, &per_cell)
    }

    /// Like [`apply_cells`](Self::apply_cells) but returns one value per cell.
    pub fn reduce_cells<F>(&self, t: usize, x: &RandomVariable, f: F) -> Vec<ExtReal>
    where
        F: Fn(&[f64], &[ExtReal]) -> ExtReal,
    {
        debug_assert_eq!(x.len(), self.atom_count());
        let part = self.partition(t);
        let mut probs = Vec::new();
        let mut vals = Vec::new();
        part.cells()
            .iter()
            .map(|cell| {
                probs.clear();
                vals.clear();
                for &a in cell {
                    probs.push(self.probs[a]);
                    vals.push(x[a]);
                }
                f(&probs, &vals)
            })
            .collect()
    }

    /// Fallible [`apply_cells`](Self::apply_cells); stops at the first error.
    pub fn try_apply_cells<F, E>(&self, t: usize, x: &RandomVariable, f: F) -> Result<RandomVariable, E>
    where
        F: Fn(&[f64], &[ExtReal]) -> Result<ExtReal, E>,
    {
        let part = self.partition(t);
        let mut per_cell = Vec::with_capacity(part.cell_count());
        for cell in part.cells() {
            let probs: Vec<f64> = cell.iter().map(|&a| self.probs[a]).collect();
            let vals: Vec<ExtReal> = cell.iter().map(|&a| x[a]).collect();
            per_cell.push(f(&probs, &vals)?);
        }
        Ok(self.broadcast(t, &per_cell))
    }

    /// Atom-indexed variable taking `per_cell[c]` on cell `c` of `F_t`.
    pub fn broadcast(&self, t: usize, per_cell: &[ExtReal]) -> RandomVariable {
        let part = self.partition(t);
        debug_assert_eq!(per_cell.len(), part.cell_count());
        (0..self.atom_count()).map(|a| per_cell[part.cell_of(a)]).collect()
    }

    /// Value of an `F_t`-measurable variable on each cell.
    pub fn cell_representatives(&self, t: usize, x: &RandomVariable) -> Vec<ExtReal> {
        self.partition(t).cells().iter().map(|cell| x[cell[0]]).collect()
    }

    /// `E[X | F_t]` with the extended-real conventions: a `+inf` atom makes
    /// `E[X+|cell]` infinite, a `-inf` atom makes `E[X-|cell]` infinite, and
    /// `inf - inf = -inf`.
    pub fn cond_expect(&self, x: &RandomVariable, t: usize) -> RandomVariable {
        self.apply_cells(t, x, cell_expectation)
    }

    /// Indicator of the union of the given cells of `F_t`.
    pub fn indicator(&self, t: usize, cells: &[usize]) -> Result<RandomVariable, SpaceError> {
        let part = self.partition(t);
        let mut per_cell = vec![ExtReal::ZERO; part.cell_count()];
        for &c in cells {
            if c >= part.cell_count() {
                return Err(SpaceError::UnknownCell { t, cell: c });
            }
            per_cell[c] = ExtReal::ONE;
        }
        Ok(self.broadcast(t, &per_cell))
    }

    /// `E[X]` as a number (the `t = 0` conditional expectation).
    pub fn expectation(&self, x: &RandomVariable) -> ExtReal {
        cell_expectation(&self.probs, x.values())
    }
}

/// Conditional expectation on a single cell, given the cell's atom
/// probabilities (not necessarily normalized) and values.
pub fn cell_expectation(probs: &[f64], values: &[ExtReal]) -> ExtReal {
    let mut pos_inf = false;
    for v in values {
        if v.is_neg_inf() {
            // E[X-] = inf, and inf - anything is -inf by convention
            return ExtReal::NEG_INF;
        }
        pos_inf |= v.is_pos_inf();
    }
    if pos_inf {
        return ExtReal::POS_INF;
    }
    let xs: Vec<f64> = values.iter().map(|v| v.get()).collect();
    ExtReal::new(weighted_mean(probs, &xs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(ps: &[(&str, f64)]) -> Vec<AtomSpec> {
        ps.iter().map(|(id, p)| AtomSpec { id: id.to_string(), p: *p }).collect()
    }

    fn cells(spec: &[&[&str]]) -> Vec<Vec<String>> {
        spec.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn smallest_nontrivial_space() {
        let s =
            FilteredSpace::build(&atoms(&[("a", 0.5), ("b", 0.5)]), &[cells(&[&["a", "b"]]), cells(&[&["a"], &["b"]])])
                .unwrap();
        assert_eq!(s.depth(), 1);
        assert_eq!(s.cell_count(0), 1);
        assert_eq!(s.cell_count(1), 2);
        assert_eq!(s.cell_count(7), 2);
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let err = FilteredSpace::build(&atoms(&[("a", 0.5), ("b", 0.6)]), &[cells(&[&["a", "b"]])]).unwrap_err();
        assert!(matches!(err, SpaceError::BadProbabilities(_)));
        let err = FilteredSpace::build(&atoms(&[("a", 1.0), ("b", 0.0)]), &[cells(&[&["a", "b"]])]).unwrap_err();
        assert!(matches!(err, SpaceError::BadProbabilities(_)));
    }

    #[test]
    fn coarser_partition_later_is_rejected() {
        let a = atoms(&[("a", 0.25), ("b", 0.25), ("c", 0.25), ("d", 0.25)]);
        let err = FilteredSpace::build(
            &a,
            &[
                cells(&[&["a", "b", "c", "d"]]),
                cells(&[&["a"], &["b"], &["c"], &["d"]]),
                cells(&[&["a", "b"], &["c", "d"]]),
            ],
        )
        .unwrap_err();
        assert_eq!(err, SpaceError::NonRefining { t: 2 });
    }

    #[test]
    fn root_must_be_trivial() {
        let err = FilteredSpace::build(&atoms(&[("a", 0.5), ("b", 0.5)]), &[cells(&[&["a"], &["b"]])]).unwrap_err();
        assert_eq!(err, SpaceError::NonTrivialRoot(2));
    }

    #[test]
    fn partition_must_cover_every_atom_once() {
        let a = atoms(&[("a", 0.5), ("b", 0.5)]);
        let err = FilteredSpace::build(&a, &[cells(&[&["a", "b"]]), cells(&[&["a"]])]).unwrap_err();
        assert!(matches!(err, SpaceError::NotAPartition { t: 1, .. }));
        let err = FilteredSpace::build(&a, &[cells(&[&["a", "b"]]), cells(&[&["a"], &["a", "b"]])]).unwrap_err();
        assert!(matches!(err, SpaceError::NotAPartition { t: 1, .. }));
        let err = FilteredSpace::build(&a, &[cells(&[&["a", "zz"]])]).unwrap_err();
        assert!(matches!(err, SpaceError::NotAPartition { t: 0, .. }));
    }

    #[test]
    fn dyadic_shapes() {
        let s = FilteredSpace::dyadic(1).unwrap();
        assert_eq!(s.atom_count(), 2);
        assert_eq!(s.partition(1).cells(), &[vec![0], vec![1]]);

        let s = FilteredSpace::dyadic(3).unwrap();
        assert_eq!(s.cell_count(2), 4);
        assert!(s.partition(2).cells().iter().all(|c| c.len() == 2));

        let s = FilteredSpace::dyadic(12).unwrap();
        assert_eq!(s.atom_count(), 4096);
        assert!(s.probs().iter().all(|&p| p == 2f64.powi(-12)));

        assert_eq!(FilteredSpace::dyadic(0).unwrap_err(), SpaceError::ZeroDepth);
    }

    fn midpoints(depth: usize) -> RandomVariable {
        let n = 1usize << depth;
        (0..n).map(|j| ExtReal::new((j as f64 + 0.5) / n as f64)).collect()
    }

    #[test]
    fn measurability() {
        let s = FilteredSpace::dyadic(3).unwrap();
        assert!(s.is_measurable(&RandomVariable::constant(8, ExtReal::new(2.0)), 0));
        let x = midpoints(3);
        assert!(!s.is_measurable(&x, 0));
        assert!(s.is_measurable(&x, 3));
        assert!(s.is_measurable(&x, 10));
    }

    #[test]
    fn cond_expect_examples() {
        let s = FilteredSpace::dyadic(1).unwrap();
        let x = RandomVariable::from_f64s(&[1.0, 3.0]);
        assert_eq!(s.cond_expect(&x, 0), RandomVariable::from_f64s(&[2.0, 2.0]));

        let x = RandomVariable::new(vec![ExtReal::POS_INF, ExtReal::NEG_INF]);
        assert_eq!(s.cond_expect(&x, 0).values(), &[ExtReal::NEG_INF; 2]);
        let x = RandomVariable::new(vec![ExtReal::POS_INF, ExtReal::new(-5.0)]);
        assert_eq!(s.cond_expect(&x, 0).values(), &[ExtReal::POS_INF; 2]);

        // mean of {1/16, 3/16, 5/16, 7/16}
        let s = FilteredSpace::dyadic(3).unwrap();
        let e = s.cond_expect(&midpoints(3), 1);
        assert!((e[0].get() - 0.25).abs() < 1e-15);
        assert!((e[7].get() - 0.75).abs() < 1e-15);
        assert!(s.is_measurable(&e, 1));
    }

    #[test]
    fn indicator_examples() {
        let s = FilteredSpace::dyadic(2).unwrap();
        assert_eq!(s.indicator(1, &[0, 1]).unwrap(), RandomVariable::from_f64s(&[1.0; 4]));
        assert_eq!(s.indicator(1, &[]).unwrap(), RandomVariable::from_f64s(&[0.0; 4]));
        assert_eq!(s.indicator(1, &[0]).unwrap(), RandomVariable::from_f64s(&[1.0, 1.0, 0.0, 0.0]));
        assert!(matches!(s.indicator(1, &[2]), Err(SpaceError::UnknownCell { .. })));
    }

    #[test]
    fn space_file_round_trip() {
        let json = r#"{"atoms":[{"id":"u","p":0.25},{"id":"d","p":0.75}],
                       "partitions":[[["u","d"]],[["u"],["d"]]]}"#;
        let file: SpaceFile = serde_json::from_str(json).unwrap();
        let s = FilteredSpace::from_file(&file).unwrap();
        assert_eq!(s.ids(), &["u".to_string(), "d".to_string()]);
        assert_eq!(s.probs(), &[0.25, 0.75]);
    }
}
