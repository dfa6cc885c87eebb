//! Axis-aligned box describing the design variable space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box of admissible design vectors.
///
/// Every axis has finite bounds with `lower < upper`; degenerate axes are
/// rejected at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DesignSpace {
    /// Builds a design space from per-axis bounds.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                left: lower.len(),
                right: upper.len(),
            });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidSpace(format!(
                    "axis {i} has non-finite bounds [{lo}, {hi}]"
                )));
            }
            if lo >= hi {
                return Err(Error::InvalidSpace(format!(
                    "axis {i} requires lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// A cube `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    /// The unit cube `[0, 1]^d`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::cube(dim, 0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Width of one axis.
    pub fn amplitude(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Whether `x` lies in the closed box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Maps a physical point to unit-cube coordinates.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| (v - self.lower[i]) / self.amplitude(i))
            .collect()
    }

    /// Maps unit-cube coordinates to a physical point.
    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, &v)| self.lower[i] + v * self.amplitude(i))
            .collect()
    }

    /// Clips a point onto the closed box, axis by axis.
    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| v.clamp(self.lower[i], self.upper[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_axis() {
        assert!(DesignSpace::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(DesignSpace::new(vec![2.0], vec![1.0]).is_err());
    }

    #[test]
    fn rejects_non_finite_bounds() {
        assert!(DesignSpace::new(vec![f64::NEG_INFINITY], vec![1.0]).is_err());
        assert!(DesignSpace::new(vec![0.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(DesignSpace::new(vec![], vec![]).is_err());
    }

    #[test]
    fn normalize_roundtrip() {
        let s = DesignSpace::new(vec![-10.0, 0.0], vec![10.0, 5.0]).unwrap();
        let x = vec![2.0, 4.0];
        let u = s.normalize(&x);
        assert_eq!(u, vec![0.6, 0.8]);
        let back = s.denormalize(&u);
        assert!((back[0] - 2.0).abs() < 1e-12 && (back[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn contains_is_inclusive() {
        let s = DesignSpace::cube(2, 0.0, 5.0).unwrap();
        assert!(s.contains(&[0.0, 5.0]));
        assert!(!s.contains(&[0.0, 5.0 + 1e-9]));
        assert!(!s.contains(&[0.0]));
    }
}
