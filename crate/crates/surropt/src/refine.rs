//! Disagreement-driven refinement: compare the two meta-models over a dense
//! scan of the design space, evaluate the true objective where they disagree
//! most, and enrich the dataset.

use serde::{Deserialize, Serialize};

use crate::dataset::{distance, Dataset};
use crate::error::{Error, Result};
use crate::kriging::{self, KrigingModel};
use crate::mds::{self, SplineModel};
use crate::regularizer::{tune_kriging, tune_spline, TuneConfig, TuneDirection};
use crate::sampling;
use crate::space::DesignSpace;

/// How the meta-model pair is (re)fitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Run condition-number width tuning after the width fit.
    pub regularize: bool,
    /// Tuning controls, used when `regularize` is set.
    pub tune: TuneConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            regularize: false,
            tune: TuneConfig::default(),
        }
    }
}

/// Both meta-models fitted on one dataset.
#[derive(Debug, Clone)]
pub struct ModelPair {
    pub kriging: KrigingModel,
    pub spline: SplineModel,
}

/// Fits both meta-models: width fit (plus condition guard), optional tuning,
/// then one factorization each.
pub fn fit_pair(dataset: &Dataset, config: &ModelConfig) -> Result<ModelPair> {
    let mut widths = kriging::default_widths(dataset);
    let mut slopes = mds::default_slopes(dataset);
    if config.regularize {
        widths = tune_kriging(dataset, &widths, &config.tune, TuneDirection::Maximize)?;
        slopes = tune_spline(dataset, &slopes, &config.tune, TuneDirection::Maximize)?;
    }
    Ok(ModelPair {
        kriging: KrigingModel::fit(dataset.clone(), widths)?,
        spline: SplineModel::fit(dataset.clone(), slopes)?,
    })
}

/// Range-normalized disagreement between the two models at `x`, in percent:
/// `100 |f_K(x) - f_S(x)| / max(F_max - F_min, 1e-12)`.
///
/// The denominator is the value range of the shared training dataset, chosen
/// over `|f_K|` so percentages stay meaningful near zero-valued predictions.
pub fn disagreement(kriging: &KrigingModel, spline: &SplineModel, x: &[f64]) -> f64 {
    let range = kriging.dataset().value_range();
    100.0 * (kriging.predict(x) - spline.predict(x)).abs() / range.max(1e-12)
}

/// Where and how strongly the two meta-models disagree over a scan.
#[derive(Debug, Clone)]
pub struct DisagreementReport {
    /// Scanned physical points.
    pub scan_points: Vec<Vec<f64>>,
    /// Range-normalized percentage difference per scan point.
    pub differences_pct: Vec<f64>,
    /// `(kriging, spline)` prediction pairs per scan point, for correlation
    /// scatter dumps.
    pub predictions: Vec<(f64, f64)>,
    /// Scan indices sorted by descending disagreement.
    pub ranked: Vec<usize>,
    /// Largest percentage difference over the scan.
    pub max_disagreement: f64,
    /// Scan point attaining the maximum.
    pub argmax: Vec<f64>,
}

/// Evaluates the disagreement on an `m`-point Sobol plan over `space`.
///
/// `seed` is the Sobol skip count, so repeated calls with the same seed probe
/// the same plan.
pub fn scan(
    kriging: &KrigingModel,
    spline: &SplineModel,
    space: &DesignSpace,
    m: usize,
    seed: u64,
) -> Result<DisagreementReport> {
    let plan = sampling::sobol(m, space.dim(), seed)?;
    let scan_points = plan.scale(space)?;
    let mut differences = Vec::with_capacity(m);
    let mut predictions = Vec::with_capacity(m);
    let range = kriging.dataset().value_range().max(1e-12);
    for p in &scan_points {
        let fk = kriging.predict(p);
        let fs = spline.predict(p);
        predictions.push((fk, fs));
        differences.push(100.0 * (fk - fs).abs() / range);
    }
    let mut ranked: Vec<usize> = (0..m).collect();
    ranked.sort_by(|&i, &j| {
        differences[j]
            .partial_cmp(&differences[i])
            .expect("disagreements are finite")
            .then(i.cmp(&j))
    });
    let top = ranked[0];
    Ok(DisagreementReport {
        max_disagreement: differences[top],
        argmax: scan_points[top].clone(),
        scan_points,
        differences_pct: differences,
        predictions,
        ranked,
    })
}

/// Result of one refinement step.
#[derive(Debug)]
pub struct MlOutcome {
    /// Dataset enriched with the newly evaluated points.
    pub dataset: Dataset,
    /// Models refitted on the enriched dataset.
    pub models: ModelPair,
    /// Pre-insertion disagreement report.
    pub report: DisagreementReport,
    /// Physical points actually inserted.
    pub inserted: Vec<Vec<f64>>,
    /// Set when separation constraints (or non-finite objective values) left
    /// fewer than the requested number of insertions.
    pub shortfall: bool,
}

/// Greedily picks up to `k` scan indices in rank order, each at least
/// `min_sep` (normalized) away from the dataset and from one another.
fn select_separated(
    report: &DisagreementReport,
    dataset: &Dataset,
    k: usize,
    min_sep: f64,
) -> Vec<usize> {
    let space = dataset.space();
    let mut chosen: Vec<usize> = Vec::new();
    for &idx in &report.ranked {
        if chosen.len() == k {
            break;
        }
        let u = space.normalize(&report.scan_points[idx]);
        let mut ok = dataset.min_distance_to(&u) >= min_sep;
        if ok {
            for &c in &chosen {
                let v = space.normalize(&report.scan_points[c]);
                if distance(&u, &v) < min_sep {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            chosen.push(idx);
        }
    }
    chosen
}

/// One machine-learning step: scan, insert up to `k` maximal-disagreement
/// points (separated by `min_sep`), evaluate the objective there, refit.
///
/// The objective is consulted once per inserted candidate; non-finite results
/// are discarded (and flagged via `shortfall`) rather than entering the
/// dataset. The report in the outcome describes the models *before*
/// insertion.
#[allow(clippy::too_many_arguments)]
pub fn ml_step(
    mut objective: impl FnMut(&[f64]) -> f64,
    dataset: &Dataset,
    kriging: &KrigingModel,
    spline: &SplineModel,
    k: usize,
    min_sep: f64,
    scan_size: usize,
    seed: u64,
    config: &ModelConfig,
) -> Result<MlOutcome> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "ml_step needs at least one insertion".into(),
        ));
    }
    let report = scan(kriging, spline, dataset.space(), scan_size, seed)?;
    let chosen = select_separated(&report, dataset, k, min_sep);
    let mut enriched = dataset.clone();
    let mut inserted = Vec::new();
    for idx in chosen {
        let x = report.scan_points[idx].clone();
        let f = objective(&x);
        if f.is_finite() {
            enriched = enriched.with_point(x.clone(), f)?;
            inserted.push(x);
        }
    }
    let models = fit_pair(&enriched, config)?;
    let shortfall = inserted.len() < k;
    Ok(MlOutcome {
        dataset: enriched,
        models,
        report,
        inserted,
        shortfall,
    })
}
