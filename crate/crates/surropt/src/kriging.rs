//! Ordinary-Kriging interpolation with per-point Gaussian correlation widths.
//!
//! The correlation between two sample points at normalized distance `r`, seen
//! from point `i`, is `exp(-(r / a_i)^2)`. Fitting assembles the bordered
//! correlation matrix (unit diagonal, a row and column of ones enforcing that
//! prediction weights sum to one) and factorizes it once; every prediction is
//! a single solve against the stored factors.

use crate::dataset::{distance, Dataset};
use crate::error::{Error, Result};
use crate::numerics::{condition_number, golden_section, DenseMatrix, LuFactors};

/// Condition-number ceiling used when choosing default widths. Widths are
/// halved until the assembled matrix conditions below this, which keeps
/// interpolation exact to well under 1e-8 and predictions bounded.
pub const WIDTH_KAPPA_GUARD: f64 = 1e6;

/// Number of correlogram bins for a dataset with `n_pairs` point pairs:
/// `max(4, floor(sqrt(n_pairs)))`, capped at 20.
pub fn default_nbins(n_pairs: usize) -> usize {
    ((n_pairs as f64).sqrt().floor() as usize).clamp(4, 20)
}

/// Distance-binned empirical correlogram of a dataset.
///
/// Pairwise normalized distances are binned into `nbins` equal-width bins over
/// `(0, r_max]`. Each bin reports its midpoint and the sill-normalized
/// correlation estimate `clamp(1 - mean(0.5 (F_i - F_j)^2) / var(F), 0, 1)`.
/// Empty bins are omitted.
///
/// Fails with [`Error::DegenerateData`] when all values are equal (zero sill),
/// in which case callers fall back to a spacing-based width.
pub fn empirical_correlogram(dataset: &Dataset, nbins: usize) -> Result<Vec<(f64, f64)>> {
    if dataset.len() < 3 {
        return Err(Error::InvalidDataset(
            "correlogram requires at least 3 points".into(),
        ));
    }
    if nbins < 2 {
        return Err(Error::InvalidConfig(
            "correlogram requires at least 2 bins".into(),
        ));
    }
    let n = dataset.len();
    let values = dataset.values();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sill = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    if sill <= 0.0 {
        return Err(Error::DegenerateData(
            "all sample values are equal".into(),
        ));
    }
    let pts = dataset.normalized();
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    let mut semis = Vec::with_capacity(n * (n - 1) / 2);
    let mut r_max: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = distance(&pts[i], &pts[j]);
            r_max = r_max.max(r);
            dists.push(r);
            semis.push(0.5 * (values[i] - values[j]) * (values[i] - values[j]));
        }
    }
    let width = r_max / nbins as f64;
    let mut out = Vec::new();
    for k in 0..nbins {
        let lo = k as f64 * width;
        let hi = (k + 1) as f64 * width;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (r, g) in dists.iter().zip(&semis) {
            if *r > lo && *r <= hi {
                sum += g;
                count += 1;
            }
        }
        if count > 0 {
            let g_hat = sum / count as f64;
            let rho = (1.0 - g_hat / sill).clamp(0.0, 1.0);
            out.push(((lo + hi) / 2.0, rho));
        }
    }
    Ok(out)
}

/// Least-squares width for the correlation model `exp(-(r/a)^2)` against
/// empirical correlogram samples, searched on `[0.05 r_max, 2 r_max]`.
pub fn fit_width_to_correlogram(pairs: &[(f64, f64)], r_max: f64) -> f64 {
    let sse = |a: f64| {
        pairs
            .iter()
            .map(|&(r, rho)| {
                let model = (-(r / a) * (r / a)).exp();
                (model - rho) * (model - rho)
            })
            .sum::<f64>()
    };
    let lo = 0.05 * r_max;
    let hi = 2.0 * r_max;
    let (a, _) = golden_section(sse, lo, hi, 1e-4 * (hi - lo), false);
    a
}

/// Fits a single correlation width to the dataset.
///
/// With at least three points and non-degenerate values this minimizes the
/// squared misfit between `exp(-(r/a)^2)` and the empirical correlogram.
/// Otherwise it falls back to twice the mean nearest-neighbour distance
/// (or 1.0 for a single point). The result is always positive.
pub fn fit_width(dataset: &Dataset) -> f64 {
    if dataset.len() >= 3 {
        let nbins = default_nbins(dataset.len() * (dataset.len() - 1) / 2);
        if let Ok(pairs) = empirical_correlogram(dataset, nbins) {
            return fit_width_to_correlogram(&pairs, dataset.max_pairwise_distance());
        }
    }
    match dataset.mean_nearest_distance() {
        Some(d) => 2.0 * d,
        None => 1.0,
    }
}

/// Assembles the bordered correlation matrix for normalized points and
/// per-point widths.
///
/// Entry `(i, j)` for `i, j < N` is `exp(-(r_ij / a_i)^2)` (unit diagonal);
/// the final row and column are ones with a zero corner. The matrix is
/// unsymmetric whenever two widths differ.
pub fn assemble_gamma(points: &[Vec<f64>], widths: &[f64]) -> DenseMatrix {
    assert_eq!(points.len(), widths.len(), "one width per point");
    let n = points.len();
    DenseMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i < n && j < n {
            if i == j {
                1.0
            } else {
                let r = distance(&points[i], &points[j]);
                (-(r / widths[i]) * (r / widths[i])).exp()
            }
        } else if i == n && j == n {
            0.0
        } else {
            1.0
        }
    })
}

/// Default per-point widths: the fitted width, halved until the assembled
/// matrix conditions below [`WIDTH_KAPPA_GUARD`].
pub fn default_widths(dataset: &Dataset) -> Vec<f64> {
    let a0 = fit_width(dataset);
    let mut widths = vec![a0; dataset.len()];
    for _ in 0..60 {
        if condition_number(&assemble_gamma(dataset.normalized(), &widths)) < WIDTH_KAPPA_GUARD {
            break;
        }
        for a in &mut widths {
            *a *= 0.5;
        }
    }
    widths
}

/// A fitted ordinary-Kriging model.
///
/// Immutable after fitting; predictions reuse the stored factorization.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    dataset: Dataset,
    widths: Vec<f64>,
    factors: LuFactors,
}

impl KrigingModel {
    /// Fits the model with one width per sample point.
    pub fn fit(dataset: Dataset, widths: Vec<f64>) -> Result<Self> {
        if widths.len() != dataset.len() {
            return Err(Error::DimensionMismatch {
                left: widths.len(),
                right: dataset.len(),
            });
        }
        if let Some(i) = widths.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::Fit(format!("width {i} must be positive")));
        }
        let gamma = assemble_gamma(dataset.normalized(), &widths);
        let factors = LuFactors::factorize(&gamma).map_err(|e| {
            let (i, j, d) = dataset.closest_pair();
            Error::Fit(format!(
                "correlation matrix not factorizable ({e}); closest points are \
                 {i} and {j} at normalized distance {d:.3e}"
            ))
        })?;
        Ok(Self {
            dataset,
            widths,
            factors,
        })
    }

    /// Fits with a single width shared by every point.
    pub fn fit_uniform(dataset: Dataset, width: f64) -> Result<Self> {
        let widths = vec![width; dataset.len()];
        Self::fit(dataset, widths)
    }

    /// Fits with fitted, condition-guarded default widths.
    pub fn fit_default(dataset: Dataset) -> Result<Self> {
        let widths = default_widths(&dataset);
        Self::fit(dataset, widths)
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Re-assembles the bordered correlation matrix (diagnostics).
    pub fn gamma(&self) -> DenseMatrix {
        assemble_gamma(self.dataset.normalized(), &self.widths)
    }

    /// Prediction weights for a physical point: the `N` sample weights and
    /// the Lagrange multiplier enforcing their unit sum.
    pub fn weights(&self, x: &[f64]) -> (Vec<f64>, f64) {
        assert_eq!(x.len(), self.dataset.dim(), "query dimension mismatch");
        let u = self.dataset.space().normalize(x);
        let n = self.dataset.len();
        let mut rhs = Vec::with_capacity(n + 1);
        for (p, a) in self.dataset.normalized().iter().zip(&self.widths) {
            let r = distance(p, &u);
            rhs.push((-(r / a) * (r / a)).exp());
        }
        rhs.push(1.0);
        let mut w = self.factors.solve(&rhs);
        let lagrange = w.pop().expect("bordered system has N+1 unknowns");
        (w, lagrange)
    }

    /// Interpolated value at a physical point.
    ///
    /// Extrapolation outside the design space is allowed; the weights still
    /// sum to one.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let (w, _) = self.weights(x);
        w.iter()
            .zip(self.dataset.values())
            .map(|(wi, fi)| wi * fi)
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
    fn correlogram_hand_enumeration() {
        // Points 0, 1, 2 on [0, 2] normalize to 0, 0.5, 1; the three pairs
        // sit at r = 0.5 (twice, semivariance 0.5 each) and r = 1 (zero).
        let ds = line_dataset(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], 2.0);
        let bins = empirical_correlogram(&ds, 2).unwrap();
        assert_eq!(bins.len(), 2);
        let sill: f64 = 1.0 / 3.0; // sample variance of (0, 1, 0)
        assert_abs_diff_eq!(bins[0].0, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(bins[0].1, (1.0 - 0.5 / sill).clamp(0.0, 1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(bins[1].1, 1.0, epsilon = 1e-12); // semivariance 0
    }

    #[test]
    fn correlogram_degenerate_values() {
        let ds = line_dataset(&[0.0, 1.0, 2.0], &[4.0, 4.0, 4.0], 2.0);
        assert!(matches!(
            empirical_correlogram(&ds, 4),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn correlogram_needs_three_points() {
        let ds = line_dataset(&[0.0, 1.0], &[0.0, 1.0], 2.0);
        assert!(empirical_correlogram(&ds, 4).is_err());
    }

    #[test]
    fn width_fit_recovers_known_decay() {
        // Sample the exact correlogram of width 0.7 and fit it back.
        let pairs: Vec<(f64, f64)> = (1..=12)
            .map(|k| {
                let r = k as f64 / 10.0;
                (r, (-(r / 0.7) * (r / 0.7)).exp())
            })
            .collect();
        let a = fit_width_to_correlogram(&pairs, 1.2);
        assert_abs_diff_eq!(a, 0.7, epsilon = 0.02);
    }

    #[test]
    fn width_fallback_two_points() {
        let ds = line_dataset(&[0.0, 1.0], &[0.0, 5.0], 2.0);
        // Normalized separation is 0.5; fallback is twice the mean
        // nearest-neighbour distance.
        assert_abs_diff_eq!(fit_width(&ds), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn width_fallback_constant_values() {
        let ds = line_dataset(&[0.0, 1.0, 2.0], &[4.0, 4.0, 4.0], 2.0);
        assert!(fit_width(&ds) > 0.0);
    }

    #[test]
    fn gamma_single_point() {
        let g = assemble_gamma(&[vec![0.3]], &[1.0]);
        assert_eq!(
            (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1)),
            (1.0, 1.0, 1.0, 0.0)
        );
    }

    #[test]
    fn gamma_symmetry_follows_widths() {
        let pts = vec![vec![0.0], vec![0.5]];
        let sym = assemble_gamma(&pts, &[0.4, 0.4]);
        assert_eq!(sym.asymmetry(), 0.0);

        let unsym = assemble_gamma(&pts, &[0.4, 0.8]);
        assert!(unsym.get(0, 1) < unsym.get(1, 0));
        assert!(unsym.asymmetry() > 0.0);
    }

    #[test]
    fn single_point_model_is_constant() {
        let ds = line_dataset(&[1.0], &[7.5], 2.0);
        let model = KrigingModel::fit_uniform(ds, 0.8).unwrap();
        for x in [0.0, 0.5, 1.7] {
            assert_abs_diff_eq!(model.predict(&[x]), 7.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn equidistant_prediction_is_average() {
        let ds = line_dataset(&[0.0, 2.0], &[1.0, 3.0], 2.0);
        let model = KrigingModel::fit_uniform(ds, 0.9).unwrap();
        assert_abs_diff_eq!(model.predict(&[1.0]), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn interpolates_and_weights_sum_to_one() {
        let ds = line_dataset(&[0.0, 0.7, 1.3, 2.0], &[3.0, -1.0, 0.5, 2.0], 2.0);
        let model = KrigingModel::fit_default(ds.clone()).unwrap();
        for (p, &f) in ds.points().iter().zip(ds.values()) {
            assert_abs_diff_eq!(model.predict(p), f, epsilon = 1e-8);
        }
        let (w, _) = model.weights(&[0.37]);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn refit_after_append_preserves_interpolation() {
        let ds = line_dataset(&[0.0, 0.7, 1.3, 2.0], &[3.0, -1.0, 0.5, 2.0], 2.0);
        let grown = ds.with_point(vec![1.0], 9.0).unwrap();
        let model = KrigingModel::fit_default(grown.clone()).unwrap();
        assert_eq!(grown.len(), ds.len() + 1);
        for (p, &f) in grown.points().iter().zip(grown.values()) {
            assert_abs_diff_eq!(model.predict(p), f, epsilon = 1e-8);
        }
    }

    #[test]
    fn translation_invariance() {
        // Shifting all points and the query by a constant leaves predictions
        // unchanged because only distances enter the model.
        let space_a = DesignSpace::cube(1, 0.0, 2.0).unwrap();
        let space_b = DesignSpace::cube(1, 5.0, 7.0).unwrap();
        let xs = [0.1, 0.9, 1.6];
        let fs = [2.0, -3.0, 1.0];
        let ds_a = Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            fs.to_vec(),
            space_a,
        )
        .unwrap();
        let ds_b = Dataset::new(
            xs.iter().map(|&x| vec![x + 5.0]).collect(),
            fs.to_vec(),
            space_b,
        )
        .unwrap();
        let m_a = KrigingModel::fit_uniform(ds_a, 0.5).unwrap();
        let m_b = KrigingModel::fit_uniform(ds_b, 0.5).unwrap();
        for q in [0.3, 1.0, 1.9] {
            assert_abs_diff_eq!(m_a.predict(&[q]), m_b.predict(&[q + 5.0]), epsilon = 1e-10);
        }
    }

    #[test]
    fn fit_rejects_bad_widths() {
        let ds = line_dataset(&[0.0, 1.0], &[1.0, 2.0], 2.0);
        assert!(KrigingModel::fit(ds.clone(), vec![1.0]).is_err());
        assert!(KrigingModel::fit(ds, vec![1.0, -0.5]).is_err());
    }
}
