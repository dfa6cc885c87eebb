//! Uniformly distributed sample plans: Halton, Sobol, Latin hypercube and
//! plain random points in the unit cube.
//!
//! All generators are deterministic given `(n, d, seed)`. Pseudo-random
//! generators (`lhs`, `random`) draw from a seeded ChaCha8 stream, which is
//! portable across platforms, so plans are byte-reproducible everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::DesignSpace;

/// Which algorithm produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Halton,
    Sobol,
    Lhs,
    Random,
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Generator::Halton => "halton",
            Generator::Sobol => "sobol",
            Generator::Lhs => "lhs",
            Generator::Random => "random",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "halton" => Ok(Generator::Halton),
            "sobol" => Ok(Generator::Sobol),
            "lhs" => Ok(Generator::Lhs),
            "random" => Ok(Generator::Random),
            other => Err(Error::InvalidConfig(format!("unknown generator `{other}`"))),
        }
    }
}

/// A set of points in the unit cube `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    points: Vec<Vec<f64>>,
    generator: Generator,
    seed: u64,
}

impl SamplePlan {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    /// Maps the unit-cube plan onto a design space.
    ///
    /// Coordinate `i` becomes `lower[i] + u[i] * (upper[i] - lower[i])`.
    pub fn scale(&self, space: &DesignSpace) -> Result<Vec<Vec<f64>>> {
        if self.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: space.dim(),
            });
        }
        Ok(self.points.iter().map(|u| space.denormalize(u)).collect())
    }
}

/// First 64 primes, used as Halton bases.
const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

/// Largest dimension the Halton generator supports.
pub const HALTON_MAX_DIM: usize = PRIMES.len();

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut scale = 1.0 / base as f64;
    while k > 0 {
        inv += (k % base) as f64 * scale;
        k /= base;
        scale /= base as f64;
    }
    inv
}

/// Halton plan: row `k` is the radical inverse of index `k + 1` in the first
/// `d` prime bases (the zero index is skipped, so no row is the origin).
pub fn halton(n: usize, d: usize) -> Result<SamplePlan> {
    if n == 0 {
        return Err(Error::EmptyPlan);
    }
    if d == 0 || d > HALTON_MAX_DIM {
        return Err(Error::UnsupportedDimension {
            generator: "halton",
            dim: d,
            max: HALTON_MAX_DIM,
        });
    }
    let points = (0..n)
        .map(|k| {
            (0..d)
                .map(|j| radical_inverse(k as u64 + 1, PRIMES[j] as u64))
                .collect()
        })
        .collect();
    Ok(SamplePlan {
        points,
        generator: Generator::Halton,
        seed: 0,
    })
}

mod sobol_data {
    //! Primitive-polynomial parameters and initial direction numbers
    //! (Joe & Kuo 2008 table) for Sobol dimensions 2..=32. Dimension 1 is the
    //! base-2 van der Corput sequence.

    /// `(s, a, m)`: polynomial degree, interior coefficient bits, and the
    /// first `s` direction-number seeds.
    pub(super) const JOE_KUO: [(u32, u32, [u32; 7]); 31] = [
        (1, 0, [1, 0, 0, 0, 0, 0, 0]),
        (2, 1, [1, 3, 0, 0, 0, 0, 0]),
        (3, 1, [1, 3, 1, 0, 0, 0, 0]),
        (3, 2, [1, 1, 1, 0, 0, 0, 0]),
        (4, 1, [1, 1, 3, 3, 0, 0, 0]),
        (4, 4, [1, 3, 5, 13, 0, 0, 0]),
        (5, 2, [1, 1, 5, 5, 17, 0, 0]),
        (5, 4, [1, 1, 5, 5, 5, 0, 0]),
        (5, 7, [1, 1, 7, 11, 19, 0, 0]),
        (5, 11, [1, 1, 5, 1, 1, 0, 0]),
        (5, 13, [1, 1, 1, 3, 11, 0, 0]),
        (5, 14, [1, 3, 5, 5, 31, 0, 0]),
        (6, 1, [1, 3, 3, 9, 7, 49, 0]),
        (6, 13, [1, 1, 1, 15, 21, 21, 0]),
        (6, 16, [1, 3, 1, 13, 27, 49, 0]),
        (6, 19, [1, 1, 1, 15, 7, 5, 0]),
        (6, 22, [1, 3, 1, 15, 13, 25, 0]),
        (6, 25, [1, 1, 5, 5, 19, 61, 0]),
        (7, 1, [1, 3, 7, 11, 23, 15, 103]),
        (7, 4, [1, 3, 7, 13, 13, 15, 69]),
        (7, 7, [1, 1, 3, 13, 7, 35, 63]),
        (7, 8, [1, 3, 5, 9, 1, 25, 53]),
        (7, 14, [1, 3, 1, 13, 9, 35, 107]),
        (7, 19, [1, 3, 1, 5, 27, 61, 31]),
        (7, 21, [1, 1, 5, 11, 19, 41, 61]),
        (7, 28, [1, 3, 5, 3, 3, 13, 69]),
        (7, 31, [1, 1, 7, 13, 1, 19, 1]),
        (7, 32, [1, 3, 7, 5, 13, 19, 59]),
        (7, 37, [1, 1, 3, 9, 25, 29, 41]),
        (7, 41, [1, 3, 5, 13, 23, 1, 55]),
        (7, 42, [1, 3, 7, 3, 13, 59, 17]),
    ];
}

/// Largest dimension the Sobol generator supports.
pub const SOBOL_MAX_DIM: usize = sobol_data::JOE_KUO.len() + 1;

const SOBOL_BITS: usize = 32;

/// Direction numbers for one dimension, stored as 32-bit fractions.
const fn sobol_directions(s: u32, a: u32, m: [u32; 7]) -> [u32; SOBOL_BITS] {
    let s = s as usize;
    let mut v = [0u32; SOBOL_BITS];
    let mut k = 0;
    while k < s && k < SOBOL_BITS {
        v[k] = m[k] << (31 - k);
        k += 1;
    }
    while k < SOBOL_BITS {
        let mut val = v[k - s] ^ (v[k - s] >> s);
        let mut j = 1;
        while j < s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                val ^= v[k - j];
            }
            j += 1;
        }
        v[k] = val;
        k += 1;
    }
    v
}

const fn sobol_direction_table() -> [[u32; SOBOL_BITS]; SOBOL_MAX_DIM] {
    let mut dirs = [[0u32; SOBOL_BITS]; SOBOL_MAX_DIM];
    // Dimension 1: van der Corput in base 2.
    let mut k = 0;
    while k < SOBOL_BITS {
        dirs[0][k] = 1u32 << (31 - k);
        k += 1;
    }
    let mut j = 0;
    while j < sobol_data::JOE_KUO.len() {
        let (s, a, m) = sobol_data::JOE_KUO[j];
        dirs[j + 1] = sobol_directions(s, a, m);
        j += 1;
    }
    dirs
}

static SOBOL_DIRECTIONS: [[u32; SOBOL_BITS]; SOBOL_MAX_DIM] = sobol_direction_table();

/// Coordinate `j` of the Sobol point with sequence index `idx` (Gray-code
/// ordering; index 0 is the origin).
fn sobol_coordinate(idx: u64, j: usize) -> f64 {
    let gray = idx ^ (idx >> 1);
    let mut x = 0u32;
    let mut bit = 0;
    while bit < SOBOL_BITS as u64 && (gray >> bit) != 0 {
        if (gray >> bit) & 1 == 1 {
            x ^= SOBOL_DIRECTIONS[j][bit as usize];
        }
        bit += 1;
    }
    x as f64 / (1u64 << SOBOL_BITS) as f64
}

/// Sobol plan: the first `n` points of the sequence after skipping `seed`
/// points. The all-zero point at index 0 is always dropped, so row `k` is the
/// sequence point with index `seed + k + 1`.
pub fn sobol(n: usize, d: usize, seed: u64) -> Result<SamplePlan> {
    if n == 0 {
        return Err(Error::EmptyPlan);
    }
    if d == 0 || d > SOBOL_MAX_DIM {
        return Err(Error::UnsupportedDimension {
            generator: "sobol",
            dim: d,
            max: SOBOL_MAX_DIM,
        });
    }
    let points = (0..n)
        .map(|k| {
            let idx = seed + k as u64 + 1;
            (0..d).map(|j| sobol_coordinate(idx, j)).collect()
        })
        .collect();
    Ok(SamplePlan {
        points,
        generator: Generator::Sobol,
        seed,
    })
}

/// Latin hypercube plan: on every axis the `n` coordinates occupy the `n`
/// equal strata of `[0, 1]` exactly once, jittered uniformly within each
/// stratum.
pub fn lhs(n: usize, d: usize, seed: u64) -> Result<SamplePlan> {
    if n == 0 {
        return Err(Error::EmptyPlan);
    }
    if d == 0 {
        return Err(Error::UnsupportedDimension {
            generator: "lhs",
            dim: d,
            max: usize::MAX,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; d]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        // Fisher-Yates shuffle of the stratum indices for this axis.
        for i in (1..n).rev() {
            let k = rng.gen_range(0..=i);
            strata.swap(i, k);
        }
        for (i, point) in points.iter_mut().enumerate() {
            let jitter: f64 = rng.gen();
            point[j] = (strata[i] as f64 + jitter) / n as f64;
        }
    }
    Ok(SamplePlan {
        points,
        generator: Generator::Lhs,
        seed,
    })
}

/// Independent uniform points from a seeded ChaCha8 stream.
pub fn random(n: usize, d: usize, seed: u64) -> Result<SamplePlan> {
    if n == 0 {
        return Err(Error::EmptyPlan);
    }
    if d == 0 {
        return Err(Error::UnsupportedDimension {
            generator: "random",
            dim: d,
            max: usize::MAX,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| (0..d).map(|_| rng.gen()).collect())
        .collect();
    Ok(SamplePlan {
        points,
        generator: Generator::Random,
        seed,
    })
}

/// Builds a plan with the given generator.
pub fn generate(generator: Generator, n: usize, d: usize, seed: u64) -> Result<SamplePlan> {
    match generator {
        Generator::Halton => halton(n, d),
        Generator::Sobol => sobol(n, d, seed),
        Generator::Lhs => lhs(n, d, seed),
        Generator::Random => random(n, d, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn halton_base2_first_rows() {
        // Radical inverses of 1, 2, 3 in base 2, worked by hand.
        let plan = halton(3, 1).unwrap();
        assert_eq!(plan.row(0), &[0.5]);
        assert_eq!(plan.row(1), &[0.25]);
        assert_eq!(plan.row(2), &[0.75]);
    }

    #[test]
    fn halton_two_dims_uses_bases_2_and_3() {
        let plan = halton(1, 2).unwrap();
        assert_abs_diff_eq!(plan.row(0)[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(plan.row(0)[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_plan_rejected() {
        assert!(matches!(halton(0, 1), Err(Error::EmptyPlan)));
        assert!(matches!(sobol(0, 1, 0), Err(Error::EmptyPlan)));
        assert!(matches!(lhs(0, 1, 0), Err(Error::EmptyPlan)));
    }

    #[test]
    fn unsupported_dimension_rejected() {
        assert!(matches!(
            halton(1, HALTON_MAX_DIM + 1),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            sobol(1, SOBOL_MAX_DIM + 1, 0),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn sobol_first_point_is_center() {
        let plan = sobol(1, 2, 0).unwrap();
        assert_eq!(plan.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn sobol_second_point_differs() {
        let plan = sobol(2, 1, 0).unwrap();
        assert_ne!(plan.row(0), plan.row(1));
    }

    #[test]
    fn sobol_prefix_property() {
        for d in [1, 2, 12] {
            let long = sobol(32, d, 0).unwrap();
            let short = sobol(16, d, 0).unwrap();
            assert_eq!(&long.points()[..16], short.points());
        }
    }

    #[test]
    fn sobol_skip_shifts_sequence() {
        let base = sobol(8, 3, 0).unwrap();
        let skipped = sobol(4, 3, 4).unwrap();
        assert_eq!(&base.points()[4..], skipped.points());
    }

    #[test]
    fn halton_prefix_property() {
        let long = halton(20, 4).unwrap();
        let short = halton(7, 4).unwrap();
        assert_eq!(&long.points()[..7], short.points());
    }

    #[test]
    fn lhs_stratification() {
        let n = 4;
        let plan = lhs(n, 2, 123).unwrap();
        for j in 0..2 {
            let mut occupancy = vec![0usize; n];
            for i in 0..n {
                let stratum = (plan.row(i)[j] * n as f64).floor() as usize;
                occupancy[stratum.min(n - 1)] += 1;
            }
            assert_eq!(occupancy, vec![1; n]);
        }
    }

    #[test]
    fn lhs_single_point_inside_cube() {
        let plan = lhs(1, 3, 9).unwrap();
        assert!(plan.row(0).iter().all(|&u| (0.0..=1.0).contains(&u)));
    }

    #[test]
    fn seeded_generators_are_deterministic() {
        assert_eq!(lhs(8, 3, 7).unwrap(), lhs(8, 3, 7).unwrap());
        assert_eq!(random(8, 3, 7).unwrap(), random(8, 3, 7).unwrap());
        assert_ne!(random(8, 3, 7).unwrap(), random(8, 3, 8).unwrap());
    }

    #[test]
    fn scale_midpoint_and_corners() {
        let space = DesignSpace::cube(2, 0.0, 5.0).unwrap();
        let plan = SamplePlan {
            points: vec![vec![0.5, 0.5]],
            generator: Generator::Random,
            seed: 0,
        };
        assert_eq!(plan.scale(&space).unwrap()[0], vec![2.5, 2.5]);

        let space = DesignSpace::cube(2, -10.0, 10.0).unwrap();
        let plan = SamplePlan {
            points: vec![vec![0.0, 1.0]],
            generator: Generator::Random,
            seed: 0,
        };
        assert_eq!(plan.scale(&space).unwrap()[0], vec![-10.0, 10.0]);
    }

    #[test]
    fn scale_identity_on_unit_cube() {
        let space = DesignSpace::unit(3).unwrap();
        let plan = sobol(5, 3, 0).unwrap();
        let scaled = plan.scale(&space).unwrap();
        for (row, orig) in scaled.iter().zip(plan.points()) {
            assert_eq!(row, orig);
        }
    }

    #[test]
    fn scale_dimension_mismatch() {
        let space = DesignSpace::unit(2).unwrap();
        let plan = sobol(2, 3, 0).unwrap();
        assert!(matches!(
            plan.scale(&space),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
