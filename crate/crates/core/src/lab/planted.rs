//! Deliberately broken assessors that the checks must reject.

use crate::assess::{Assessor, AssessorFlags};
use crate::error::AssessError;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

/// `E[X | F_t] + E[X]`: leaks information across cells.
#[derive(Clone, Copy, Debug, Default)]
pub struct CrossCellMean;

impl Assessor for CrossCellMean {
    fn label(&self) -> String {
        "planted_cross_cell_mean".into()
    }

    fn flags(&self) -> AssessorFlags {
        AssessorFlags::default()
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        let global = space.expectation(x);
        Ok(space.cond_expect(x, t).map(|v| v + global))
    }

    fn extends_directly(&self) -> bool {
        true
    }
}

/// `-E[X | F_t]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct AntiMonotone;

impl Assessor for AntiMonotone {
    fn label(&self) -> String {
        "planted_anti_monotone".into()
    }

    fn flags(&self) -> AssessorFlags {
        AssessorFlags::default()
    }

    fn evaluate(&self, space: &FilteredSpace, t: usize, x: &RandomVariable) -> Result<RandomVariable, AssessError> {
        Ok(space.cond_expect(x, t).map(|v| -v))
    }

    fn extends_directly(&self) -> bool {
        true
    }
}
