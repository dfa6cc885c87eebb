//! Width tuning for either meta-model: cyclic per-point golden-section line
//! searches that drive the condition number of the system matrix up (or, for
//! the inverse experiment, down) while every width stays within +-50% of its
//! starting value.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kriging::assemble_gamma;
use crate::mds::system_matrix;
use crate::numerics::{condition_number, golden_section, DenseMatrix, KAPPA_CAP};

/// Whether tuning drives the condition number up or down.
///
/// `Maximize` is the working direction; `Minimize` exists to reproduce the
/// spiky "every point its own island" surfaces for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuneDirection {
    Maximize,
    Minimize,
}

/// Tuning controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuneConfig {
    /// Full cycles over the widths.
    pub sweeps: usize,
    /// Line-search interval tolerance as a fraction of each width interval;
    /// also the relative improvement a move must achieve to be accepted.
    pub line_tol: f64,
    /// Probes whose condition number reaches this cap are rejected.
    pub kappa_cap: f64,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self {
            sweeps: 3,
            line_tol: 1e-3,
            kappa_cap: 1e14,
        }
    }
}

impl TuneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_cap > 1.0) {
            return Err(Error::InvalidConfig("kappa_cap must exceed 1".into()));
        }
        if !(self.line_tol > 0.0) {
            return Err(Error::InvalidConfig("line_tol must be positive".into()));
        }
        Ok(())
    }
}

fn tune_widths(
    assemble: impl Fn(&[f64]) -> DenseMatrix,
    start: &[f64],
    config: &TuneConfig,
    direction: TuneDirection,
) -> Result<Vec<f64>> {
    config.validate()?;
    if let Some(i) = start.iter().position(|w| !(*w > 0.0)) {
        return Err(Error::Tune(format!("initial width {i} must be positive")));
    }
    let kappa_of = |w: &[f64]| condition_number(&assemble(w));
    let initial = kappa_of(start);
    if initial >= KAPPA_CAP {
        return Err(Error::Tune(
            "initial system matrix is numerically singular; repair the widths \
             or the dataset before tuning"
                .into(),
        ));
    }
    let maximize = direction == TuneDirection::Maximize;
    let mut widths = start.to_vec();
    let mut current = initial;
    for _ in 0..config.sweeps {
        let mut improved = false;
        for i in 0..widths.len() {
            let lo = 0.5 * start[i];
            let hi = 1.5 * start[i];
            let probe = |w: f64| {
                let mut trial = widths.clone();
                trial[i] = w;
                let kappa = kappa_of(&trial);
                if kappa >= config.kappa_cap {
                    f64::NAN // rejected: golden_section treats it as worst
                } else {
                    kappa
                }
            };
            let (best_w, best_kappa) =
                golden_section(probe, lo, hi, config.line_tol * (hi - lo), maximize);
            if !best_kappa.is_finite() {
                continue;
            }
            let accept = if maximize {
                best_kappa > current * (1.0 + config.line_tol)
            } else {
                best_kappa < current * (1.0 - config.line_tol)
            };
            if accept {
                widths[i] = best_w;
                current = best_kappa;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(widths)
}

/// Tunes Kriging correlation widths within `[0.5 a0_i, 1.5 a0_i]`.
///
/// The accepted widths never decrease the condition number (for
/// `Maximize`); probes that reach `kappa_cap` or fail factorization are
/// rejected outright. Fails when the starting matrix is already singular.
pub fn tune_kriging(
    dataset: &Dataset,
    start: &[f64],
    config: &TuneConfig,
    direction: TuneDirection,
) -> Result<Vec<f64>> {
    if start.len() != dataset.len() {
        return Err(Error::DimensionMismatch {
            left: start.len(),
            right: dataset.len(),
        });
    }
    let points = dataset.normalized().to_vec();
    tune_widths(
        move |w| assemble_gamma(&points, w),
        start,
        config,
        direction,
    )
}

/// Tunes spline support slopes within `[0.5 b0_i, 1.5 b0_i]`; identical
/// contract with the kernel collocation matrix in place of the correlation
/// matrix.
///
/// Its condition number grows as supports widen, i.e. as slopes shrink, so
/// maximization typically moves slopes toward their lower bounds.
pub fn tune_spline(
    dataset: &Dataset,
    start: &[f64],
    config: &TuneConfig,
    direction: TuneDirection,
) -> Result<Vec<f64>> {
    if start.len() != dataset.len() {
        return Err(Error::DimensionMismatch {
            left: start.len(),
            right: dataset.len(),
        });
    }
    let points = dataset.normalized().to_vec();
    tune_widths(
        move |w| system_matrix(&points, w),
        start,
        config,
        direction,
    )
}
