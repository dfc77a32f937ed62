//! Random variables on a finite space: one extended real per atom.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::ext::ExtReal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomVariable(Vec<ExtReal>);

impl RandomVariable {
    pub fn new(values: Vec<ExtReal>) -> Self {
        RandomVariable(values)
    }

    pub fn from_f64s(values: &[f64]) -> Self {
        RandomVariable(values.iter().map(|&v| ExtReal::new(v)).collect())
    }

    pub fn constant(len: usize, c: ExtReal) -> Self {
        RandomVariable(vec![c; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.0
    }

    pub fn into_values(self) -> Vec<ExtReal> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = ExtReal> + '_ {
        self.0.iter().copied()
    }

    pub fn map(&self, f: impl Fn(ExtReal) -> ExtReal) -> Self {
        RandomVariable(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(ExtReal, ExtReal) -> ExtReal) -> Self {
        assert_eq!(self.len(), other.len(), "random variables live on different spaces");
        RandomVariable(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v.scale(c))
    }

    pub fn pos_part(&self) -> Self {
        self.map(ExtReal::pos_part)
    }

    /// `X v (-n)`, the truncation used by the hat-extension.
    pub fn floor_at(&self, n: f64) -> Self {
        let lo = ExtReal::new(-n);
        self.map(|v| v.max(lo))
    }

    /// `X <= Y` on every atom.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Largest finite `|x|`, ignoring infinities.
    pub fn max_abs_finite(&self) -> f64 {
        self.0.iter().filter_map(|v| v.finite()).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> ExtReal {
        self.0.iter().copied().min().unwrap_or(ExtReal::POS_INF)
    }

    pub fn max_value(&self) -> ExtReal {
        self.0.iter().copied().max().unwrap_or(ExtReal::NEG_INF)
    }
}

impl Index<usize> for RandomVariable {
    type Output = ExtReal;

    fn index(&self, atom: usize) -> &ExtReal {
        &self.0[atom]
    }
}

impl FromIterator<ExtReal> for RandomVariable {
    fn from_iter<I: IntoIterator<Item = ExtReal>>(iter: I) -> Self {
        RandomVariable(iter.into_iter().collect())
    }
}

impl From<Vec<ExtReal>> for RandomVariable {
    fn from(v: Vec<ExtReal>) -> Self {
        RandomVariable(v)
    }
}
