//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by sampling, model fitting, tuning and the optimizer.
#[derive(Debug, Error)]
pub enum Error {
    /// A design-space constructor was given unusable bounds.
    #[error("invalid design space: {0}")]
    InvalidSpace(String),

    /// A sequence generator was asked for more dimensions than its tables cover.
    #[error("{generator} supports at most {max} dimensions, got {dim}")]
    UnsupportedDimension {
        generator: &'static str,
        dim: usize,
        max: usize,
    },

    /// An empty sample plan was requested.
    #[error("sample plan must contain at least one point")]
    EmptyPlan,

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// LU factorization hit a vanishing pivot.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// A dataset violates its invariants (duplicates, non-finite values, ...).
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// A meta-model could not be fitted.
    #[error("model fit failed: {0}")]
    Fit(String),

    /// Width tuning could not start from the given configuration.
    #[error("width tuning failed: {0}")]
    Tune(String),

    /// Statistics requested on data without spread (all values equal).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// An objective was evaluated outside its bounds.
    #[error("point outside objective bounds on axis {axis}: {value} not in [{lower}, {upper}]")]
    OutOfBounds {
        axis: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    /// An optimizer or command configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A brute-force oracle would exceed its evaluation guard.
    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
