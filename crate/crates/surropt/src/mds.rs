//! Interpolating splines built from compact-support kernels, one per sample
//! point, linear in the distance to their center.

use crate::dataset::{distance, Dataset};
use crate::error::{Error, Result};
use crate::kriging::WIDTH_KAPPA_GUARD;
use crate::numerics::{condition_number, DenseMatrix, LuFactors};

/// Compact linear kernel: `1 - b r` while `b r <= 1`, zero beyond.
///
/// The value lies in `[0, 1]`, is continuous in `r`, and vanishes exactly at
/// and beyond the support radius `1 / b`.
pub fn kernel(r: f64, b: f64) -> f64 {
    debug_assert!(r >= 0.0 && b > 0.0);
    let t = b * r;
    if t <= 1.0 {
        1.0 - t
    } else {
        0.0
    }
}

/// Kernel collocation matrix: entry `(i, j)` is kernel `j` evaluated at point
/// `i`, using normalized coordinates. Unsymmetric when slopes differ.
pub fn system_matrix(points: &[Vec<f64>], slopes: &[f64]) -> DenseMatrix {
    assert_eq!(points.len(), slopes.len(), "one slope per point");
    let n = points.len();
    DenseMatrix::from_fn(n, n, |i, j| kernel(distance(&points[i], &points[j]), slopes[j]))
}

/// Default per-point slopes.
///
/// The support radius is set to twice the mean nearest-neighbour spacing, so
/// neighbouring kernels overlap while staying local; the slopes are then
/// doubled (supports shrunk) until the collocation matrix conditions below
/// [`WIDTH_KAPPA_GUARD`]. A single-point dataset gets slope 1.
pub fn default_slopes(dataset: &Dataset) -> Vec<f64> {
    let b0 = match dataset.mean_nearest_distance() {
        Some(d) if d > 0.0 => 1.0 / (2.0 * d),
        _ => 1.0,
    };
    let mut slopes = vec![b0; dataset.len()];
    for _ in 0..60 {
        if condition_number(&system_matrix(dataset.normalized(), &slopes)) < WIDTH_KAPPA_GUARD {
            break;
        }
        for b in &mut slopes {
            *b *= 2.0;
        }
    }
    slopes
}

/// A fitted compact-support spline interpolant.
#[derive(Debug, Clone)]
pub struct SplineModel {
    dataset: Dataset,
    slopes: Vec<f64>,
    weights: Vec<f64>,
}

impl SplineModel {
    /// Solves the collocation system `A w = F` for the kernel weights.
    pub fn fit(dataset: Dataset, slopes: Vec<f64>) -> Result<Self> {
        if slopes.len() != dataset.len() {
            return Err(Error::DimensionMismatch {
                left: slopes.len(),
                right: dataset.len(),
            });
        }
        if let Some(i) = slopes.iter().position(|b| !(*b > 0.0)) {
            return Err(Error::Fit(format!("slope {i} must be positive")));
        }
        let a = system_matrix(dataset.normalized(), &slopes);
        let factors = LuFactors::factorize(&a).map_err(|e| {
            // Isolated supports leave a point coupled only to itself; report
            // them when present, otherwise the closest pair.
            let n = dataset.len();
            let isolated: Vec<usize> = (0..n)
                .filter(|&i| (0..n).all(|j| i == j || a.get(i, j) == 0.0))
                .collect();
            if isolated.is_empty() {
                let (i, j, d) = dataset.closest_pair();
                Error::Fit(format!(
                    "spline system not factorizable ({e}); closest points are \
                     {i} and {j} at normalized distance {d:.3e}"
                ))
            } else {
                Error::Fit(format!(
                    "spline system not factorizable ({e}); isolated supports at \
                     points {isolated:?}"
                ))
            }
        })?;
        let weights = factors.solve(dataset.values());
        Ok(Self {
            dataset,
            slopes,
            weights,
        })
    }

    /// Fits with a single slope shared by every point.
    pub fn fit_uniform(dataset: Dataset, slope: f64) -> Result<Self> {
        let slopes = vec![slope; dataset.len()];
        Self::fit(dataset, slopes)
    }

    /// Fits with the spacing-based, condition-guarded default slopes.
    pub fn fit_default(dataset: Dataset) -> Result<Self> {
        let slopes = default_slopes(&dataset);
        Self::fit(dataset, slopes)
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Re-assembles the collocation matrix (diagnostics).
    pub fn matrix(&self) -> DenseMatrix {
        system_matrix(self.dataset.normalized(), &self.slopes)
    }

    /// Sum of weighted kernels at a physical point.
    ///
    /// Points beyond every support radius evaluate to exactly 0.
    pub fn predict(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dataset.dim(), "query dimension mismatch");
        let u = self.dataset.space().normalize(x);
        self.dataset
            .normalized()
            .iter()
            .zip(self.slopes.iter().zip(&self.weights))
            .map(|(p, (&b, &w))| w * kernel(distance(p, &u), b))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DesignSpace;
    use approx::assert_abs_diff_eq;

    fn line_dataset(xs: &[f64], fs: &[f64], hi: f64) -> Dataset {
        Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            fs.to_vec(),
            DesignSpace::cube(1, 0.0, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel(0.0, 3.0), 1.0);
        assert_eq!(kernel(1.0 / 3.0, 3.0), 0.0);
        assert_eq!(kernel(0.5, 1.0), 0.5);
        assert_eq!(kernel(2.0, 1.0), 0.0);
    }

    #[test]
    fn touching_supports_give_identity_system() {
        // Normalized points 0 and 1 with slope 1: each kernel vanishes at the
        // other center, so the system is the identity and w = F.
        let ds = line_dataset(&[0.0, 1.0], &[0.0, 1.0], 1.0);
        let model = SplineModel::fit_uniform(ds, 1.0).unwrap();
        assert_eq!(model.weights(), &[0.0, 1.0]);
        assert_abs_diff_eq!(model.predict(&[0.5]), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn single_point_weight_is_value() {
        let ds = line_dataset(&[0.5], &[4.25], 1.0);
        let model = SplineModel::fit_uniform(ds, 2.0).unwrap();
        assert_eq!(model.weights(), &[4.25]);
        assert_abs_diff_eq!(model.predict(&[0.5]), 4.25, epsilon = 1e-12);
    }

    #[test]
    fn overlapping_equal_slopes_symmetric() {
        let ds = line_dataset(&[0.0, 0.4, 1.0], &[1.0, 2.0, 0.0], 1.0);
        let a = system_matrix(ds.normalized(), &[0.8, 0.8, 0.8]);
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn interpolates_dataset() {
        let ds = line_dataset(&[0.0, 0.3, 0.55, 0.8, 1.0], &[1.0, -2.0, 0.5, 3.0, 1.5], 1.0);
        let model = SplineModel::fit_default(ds.clone()).unwrap();
        for (p, &f) in ds.points().iter().zip(ds.values()) {
            assert_abs_diff_eq!(model.predict(p), f, epsilon = 1e-8);
        }
    }

    #[test]
    fn zero_outside_all_supports() {
        let ds = line_dataset(&[0.4, 0.5], &[3.0, -1.0], 1.0);
        let model = SplineModel::fit_uniform(ds, 10.0).unwrap();
        assert_eq!(model.predict(&[0.9]), 0.0);
    }

    #[test]
    fn value_scaling_scales_weights_and_predictions() {
        let xs = [0.0, 0.35, 0.7, 1.0];
        let fs = [1.0, 2.0, -1.0, 0.5];
        let scaled: Vec<f64> = fs.iter().map(|v| v * -3.5).collect();
        let m1 = SplineModel::fit_uniform(line_dataset(&xs, &fs, 1.0), 1.8).unwrap();
        let m2 = SplineModel::fit_uniform(line_dataset(&xs, &scaled, 1.0), 1.8).unwrap();
        for (w1, w2) in m1.weights().iter().zip(m2.weights()) {
            assert_abs_diff_eq!(w1 * -3.5, *w2, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(
            m1.predict(&[0.2]) * -3.5,
            m2.predict(&[0.2]),
            epsilon = 1e-10
        );
    }

    #[test]
    fn lipschitz_continuity_bound() {
        let ds = line_dataset(&[0.0, 0.4, 0.75, 1.0], &[2.0, -1.0, 1.0, 0.0], 1.0);
        let model = SplineModel::fit_default(ds).unwrap();
        let lipschitz: f64 = model
            .weights()
            .iter()
            .zip(model.slopes())
            .map(|(w, b)| w.abs() * b)
            .sum();
        let delta = 1e-4;
        for x in [0.1, 0.33, 0.6, 0.9] {
            let jump = (model.predict(&[x + delta]) - model.predict(&[x])).abs();
            assert!(jump <= lipschitz * delta + 1e-12);
        }
    }
}
