//! Dense linear algebra and derivative-free search primitives shared by the
//! meta-models and the width tuner.

mod matrix;
mod search;

pub use matrix::{condition_number, lu_solve, singular_values, DenseMatrix, LuFactors, KAPPA_CAP};
pub use search::{coordinate_compass_maximize, golden_section};
