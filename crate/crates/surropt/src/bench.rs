//! Analytic objective functions with evaluation accounting, plus a brute-force
//! grid oracle for tests.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::space::DesignSpace;

/// An objective function over a box, with bounds checking and an atomic call
/// counter.
///
/// Out-of-bounds evaluations are errors rather than clamps so that optimizer
/// bound bugs surface immediately. Evaluators must be deterministic; the
/// `pure` flag additionally declares them safe to call from several threads
/// at once, which enables batched parallel evaluation.
pub struct Objective {
    name: String,
    space: DesignSpace,
    pure: bool,
    threads: usize,
    count: AtomicU64,
    eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.space.dim())
            .field("pure", &self.pure)
            .field("eval_count", &self.eval_count())
            .finish()
    }
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        space: DesignSpace,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            space,
            pure: true,
            threads: 1,
            count: AtomicU64::new(0),
            eval: Box::new(eval),
        }
    }

    /// Marks the evaluator as unsafe for concurrent calls; batches then run
    /// sequentially regardless of the thread cap.
    pub fn with_purity(mut self, pure: bool) -> Self {
        self.pure = pure;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// Caps the number of worker threads used by [`Objective::evaluate_batch`].
    pub fn set_threads(&mut self, threads: usize) {
        self.threads = threads.max(1);
    }

    /// Evaluator calls since construction or the last reset.
    pub fn eval_count(&self) -> u64 {
        self.count.load(Ordering::SeqCst)
    }

    pub fn reset_count(&self) {
        self.count.store(0, Ordering::SeqCst);
    }

    /// Evaluates at `x`, counting the call. Errors if `x` leaves the bounds.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: self.space.dim(),
            });
        }
        for (axis, &v) in x.iter().enumerate() {
            let lo = self.space.lower()[axis];
            let hi = self.space.upper()[axis];
            if !(v >= lo && v <= hi) {
                return Err(Error::OutOfBounds {
                    axis,
                    value: v,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        self.count.fetch_add(1, Ordering::SeqCst);
        Ok((self.eval)(x))
    }

    /// Evaluates a batch of points, committing results in input order.
    ///
    /// When the evaluator is pure and the thread cap allows, points are split
    /// across scoped worker threads; the output order (and therefore every
    /// downstream artifact) is independent of scheduling.
    pub fn evaluate_batch(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let workers = self.threads.min(points.len().max(1));
        if !self.pure || workers <= 1 {
            return points.iter().map(|p| self.evaluate(p)).collect();
        }
        let chunk = points.len().div_ceil(workers);
        let results: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = points
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|p| self.evaluate(p)).collect()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut out = Vec::with_capacity(points.len());
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }
}

/// Two-dimensional test function on `[0, 5]^2` mixing a shallow banana valley
/// with a trigonometric ripple (arguments in radians):
/// `2 + 0.01 (x2 - x1^2)^2 + (1 - x1)^2 + 2 (2 - x2)^2
///  + 7 sin(0.5 x1) sin(0.7 x1 x2)`.
pub fn sasena_value(x1: f64, x2: f64) -> f64 {
    2.0 + 0.01 * (x2 - x1 * x1).powi(2)
        + (1.0 - x1).powi(2)
        + 2.0 * (2.0 - x2).powi(2)
        + 7.0 * (0.5 * x1).sin() * (0.7 * x1 * x2).sin()
}

/// The [`sasena_value`] function wrapped as a counted objective.
pub fn sasena() -> Objective {
    Objective::new(
        "sasena",
        DesignSpace::cube(2, 0.0, 5.0).expect("static bounds"),
        |x| sasena_value(x[0], x[1]),
    )
}

/// Shifted sphere `sum_i (x_i - 0.5)^2` on `[-10, 10]^d`.
pub fn quadratic(dim: usize) -> Result<Objective> {
    if dim == 0 {
        return Err(Error::InvalidConfig(
            "quadratic objective needs dimension >= 1".into(),
        ));
    }
    Ok(Objective::new(
        format!("quadratic{dim}"),
        DesignSpace::cube(dim, -10.0, 10.0)?,
        |x| x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum(),
    ))
}

/// Looks an objective up by name: `sasena` or `quadratic<d>` (e.g.
/// `quadratic12`).
pub fn by_name(name: &str) -> Result<Objective> {
    if name == "sasena" {
        return Ok(sasena());
    }
    if let Some(dim) = name.strip_prefix("quadratic") {
        let dim: usize = dim
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("unknown objective `{name}`")))?;
        return quadratic(dim);
    }
    Err(Error::InvalidConfig(format!("unknown objective `{name}`")))
}

/// Exhaustive minimum over a regular grid including the bounds.
///
/// Guarded: refuses jobs with more than `1e7` grid nodes above three
/// dimensions.
pub fn grid_oracle_min(objective: &Objective, resolution: usize) -> Result<(Vec<f64>, f64)> {
    if resolution < 2 {
        return Err(Error::InvalidConfig(
            "grid oracle needs at least 2 nodes per axis".into(),
        ));
    }
    let d = objective.dim();
    let nodes = (resolution as f64).powi(d as i32);
    if d > 3 && nodes > 1e7 {
        return Err(Error::OracleBudget(format!(
            "{resolution}^{d} grid nodes exceed the 1e7 guard"
        )));
    }
    let space = objective.space();
    let mut index = vec![0usize; d];
    let mut best_x = Vec::new();
    let mut best_f = f64::INFINITY;
    loop {
        let x: Vec<f64> = index
            .iter()
            .enumerate()
            .map(|(axis, &k)| {
                space.lower()[axis] + space.amplitude(axis) * k as f64 / (resolution - 1) as f64
            })
            .collect();
        let f = objective.evaluate(&x)?;
        if f < best_f {
            best_f = f;
            best_x = x;
        }
        // Odometer increment over the grid indices.
        let mut axis = 0;
        loop {
            index[axis] += 1;
            if index[axis] < resolution {
                break;
            }
            index[axis] = 0;
            axis += 1;
            if axis == d {
                return Ok((best_x, best_f));
            }
        }
    }
}
