//! Sampled objective values over a design space, shared by both meta-models.

use crate::error::{Error, Result};
use crate::space::DesignSpace;

/// Pairwise separation below which two points are considered duplicates
/// (in unit-cube coordinates).
pub const MIN_SEPARATION: f64 = 1e-10;

/// Euclidean distance between two coordinate slices.
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Design points with their evaluated objective values.
///
/// Model geometry always works in unit-cube coordinates (each axis divided by
/// its design-space amplitude), so kernel widths are dimensionless and axes
/// with different units are comparable. The normalized coordinates are cached
/// at construction.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    space: DesignSpace,
    normalized: Vec<Vec<f64>>,
}

impl Dataset {
    /// Validates and stores sample points with their values.
    ///
    /// Fails on empty data, length mismatches, non-finite entries, or a pair
    /// of points closer than [`MIN_SEPARATION`] in normalized coordinates.
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, space: DesignSpace) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDataset("no sample points".into()));
        }
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                left: points.len(),
                right: values.len(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    left: p.len(),
                    right: space.dim(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "value {i} is not finite"
            )));
        }
        let normalized: Vec<Vec<f64>> = points.iter().map(|p| space.normalize(p)).collect();
        for i in 0..normalized.len() {
            for j in (i + 1)..normalized.len() {
                if distance(&normalized[i], &normalized[j]) <= MIN_SEPARATION {
                    return Err(Error::InvalidDataset(format!(
                        "points {i} and {j} are closer than the duplicate threshold"
                    )));
                }
            }
        }
        Ok(Self {
            points,
            values,
            space,
            normalized,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    /// Cached unit-cube coordinates of all points.
    pub fn normalized(&self) -> &[Vec<f64>] {
        &self.normalized
    }

    /// Spread of the sample values, `max - min`.
    pub fn value_range(&self) -> f64 {
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = self
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        max - min
    }

    /// Largest pairwise distance in normalized coordinates.
    pub fn max_pairwise_distance(&self) -> f64 {
        let mut d_max: f64 = 0.0;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                d_max = d_max.max(distance(&self.normalized[i], &self.normalized[j]));
            }
        }
        d_max
    }

    /// Mean distance to the nearest neighbour in normalized coordinates.
    /// Returns `None` for a single-point dataset.
    pub fn mean_nearest_distance(&self) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let mut total = 0.0;
        for i in 0..self.len() {
            let mut nearest = f64::INFINITY;
            for j in 0..self.len() {
                if i != j {
                    nearest = nearest.min(distance(&self.normalized[i], &self.normalized[j]));
                }
            }
            total += nearest;
        }
        Some(total / self.len() as f64)
    }

    /// Indices of the closest pair of points, for fit diagnostics.
    pub(crate) fn closest_pair(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::INFINITY);
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d = distance(&self.normalized[i], &self.normalized[j]);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        best
    }

    /// Normalized distance from `u` (unit-cube coords) to the nearest point.
    pub fn min_distance_to(&self, u: &[f64]) -> f64 {
        self.normalized
            .iter()
            .map(|p| distance(p, u))
            .fold(f64::INFINITY, f64::min)
    }

    /// New dataset with one more evaluated point.
    pub fn with_point(&self, point: Vec<f64>, value: f64) -> Result<Self> {
        let mut points = self.points.clone();
        let mut values = self.values.clone();
        points.push(point);
        values.push(value);
        Self::new(points, values, self.space.clone())
    }

    /// New dataset restricted to the given indices (same space).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let values = indices.iter().map(|&i| self.values[i]).collect();
        Self::new(points, values, self.space.clone())
    }
}
