//! Surrogate-based global optimization for expensive black-box objectives.
//!
//! The toolkit combines five pieces:
//!
//! * **Sample plans** ([`sampling`]) — deterministic Halton/Sobol sequences,
//!   Latin hypercube and seeded random plans over a [`DesignSpace`].
//! * **Two interpolating meta-models** — ordinary Kriging with per-point
//!   Gaussian correlation widths ([`kriging`]) and compact-support linear
//!   splines ([`mds`]). Both reproduce every training value exactly.
//! * **Width tuning** ([`regularizer`]) — per-point kernel widths are pushed
//!   up or down the condition number of the model's system matrix within
//!   +-50% bounds.
//! * **Disagreement refinement** ([`refine`]) — the two models are compared
//!   over a dense scan; the true objective is evaluated where they disagree
//!   most and both models are refitted.
//! * **The optimizer** ([`psi_ai`]) — iterates refinement, a meta-model
//!   search for low predictions, and recentering/shrinking of the design box
//!   around the incumbent, under a hard evaluation budget.
//!
//! ```
//! use surropt::bench;
//! use surropt::psi_ai::{optimize, PsiConfig};
//!
//! let objective = bench::sasena();
//! let space = objective.space().clone();
//! let mut config = PsiConfig::for_dimension(2);
//! config.n_doe = 24;
//! config.n_iter = 4;
//! config.budget = 24 + 4 * 16;
//! config.scan_size = Some(128);
//!
//! let history = optimize(&objective, &space, &config).unwrap();
//! assert!(history.best_value() < 2.0); // global minimum is about -1.46
//! assert!(history.evaluations() <= config.budget);
//! ```

pub mod bench;
pub mod dataset;
pub mod error;
pub mod kriging;
pub mod mds;
pub mod numerics;
pub mod psi_ai;
pub mod refine;
pub mod regularizer;
pub mod sampling;
pub mod space;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use space::DesignSpace;

// Book chapters double as doc-tests so every snippet in the guide compiles
// and runs against the current API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/kriging.md")]
    mod kriging {}
    #[doc = include_str!("../../../book/src/splines.md")]
    mod splines {}
    #[doc = include_str!("../../../book/src/tuning.md")]
    mod tuning {}
    #[doc = include_str!("../../../book/src/refinement.md")]
    mod refinement {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
