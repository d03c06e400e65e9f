use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("field has {got} values but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field value at vertex {0} is not finite")]
    NonFinite(usize),
}

/// Real-valued function on the vertices of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self, FieldError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite(i));
        }
        Ok(ScalarField { values })
    }

    /// Wraps values that are finite by construction.
    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        ScalarField { values }
    }

    pub fn constant(len: usize, value: f64) -> Self {
        ScalarField::from_vec(vec![value; len])
    }

    pub fn zeros(len: usize) -> Self {
        Self::constant(len, 0.0)
    }

    /// Indicator of a single vertex.
    pub fn delta(len: usize, at: usize) -> Self {
        let mut f = Self::zeros(len);
        f.values[at] = 1.0;
        f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_graph(&self, g: &WeightedGraph) -> Result<(), FieldError> {
        if self.len() == g.vertex_count() {
            Ok(())
        } else {
            Err(FieldError::LengthMismatch { expected: g.vertex_count(), got: self.len() })
        }
    }

    /// `‖f‖∞`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sup f − inf f`.
    pub fn oscillation(&self) -> f64 {
        self.max() - self.min()
    }

    /// `‖self − other‖∞`.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.len(), other.len());
        self.values.iter().zip(&other.values).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Largest value of `other − self`; nonpositive iff `other ≤ self` pointwise.
    pub fn max_excess(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.len(), other.len());
        self.values.iter().zip(&other.values).map(|(a, b)| b - a).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_vec(self.values.iter().map(|&v| op(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, op: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert_eq!(self.len(), other.len());
        ScalarField::from_vec(self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect())
    }

    /// `Σ_x m(x) f(x)`.
    pub fn mass(&self, g: &WeightedGraph) -> f64 {
        self.values.iter().zip(g.measures()).map(|(f, m)| f * m).sum()
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(ScalarField::new(vec![0.0, f64::NAN]).unwrap_err(), FieldError::NonFinite(1));
        assert!(ScalarField::new(vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn norms() {
        let f = ScalarField::new(vec![1.0, -3.0, 2.0]).unwrap();
        assert_eq!(f.sup_norm(), 3.0);
        assert_eq!(f.oscillation(), 5.0);
        let g = ScalarField::new(vec![1.5, -3.0, 2.0]).unwrap();
        assert_eq!(f.sup_distance(&g), 0.5);
        assert_eq!(f.max_excess(&g), 0.5);
    }
}
