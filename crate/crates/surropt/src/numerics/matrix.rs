//! Dense row-major matrices, LU factorization with partial pivoting, and a
//! 2-norm condition number via one-sided Jacobi SVD.
//!
//! The systems in this crate are small (a few hundred rows at most) and often
//! unsymmetric, so a plain dense LU with reusable factors covers every solve.

use crate::error::{Error, Result};

/// Condition numbers at or above this value are reported as the cap itself;
/// callers treat capped values as numerically singular.
pub const KAPPA_CAP: f64 = 1e14;

/// Relative pivot threshold below which LU factorization reports singularity.
const PIVOT_TOL: f64 = 1e-14;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a square matrix from nested rows; intended for small literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// `A x` for a vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row-asymmetry `|A - A^T|`, for square matrices.
    pub fn asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// LU factors of a square matrix with partial pivoting, reusable across
/// many right-hand sides.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Factorizes `a`; fails when a pivot falls below `1e-14 * max|a|`.
    pub fn factorize(a: &DenseMatrix) -> Result<Self> {
        assert!(a.is_square(), "LU requires a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular("zero matrix".into()));
        }
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_val = lu.get(k, k).abs();
            for i in (k + 1)..n {
                let v = lu.get(i, k).abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = i;
                }
            }
            if pivot_val < PIVOT_TOL * scale {
                return Err(Error::Singular(format!(
                    "pivot {pivot_val:.3e} below threshold at column {k}"
                )));
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu.get(k, j);
                    lu.set(k, j, lu.get(pivot_row, j));
                    lu.set(pivot_row, j, tmp);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu.get(k, k);
            for i in (k + 1)..n {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                for j in (k + 1)..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b` using the stored factors.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut sum = x[i];
            for j in 0..i {
                sum -= self.lu.get(i, j) * x[j];
            }
            x[i] = sum;
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            for j in (i + 1)..n {
                sum -= self.lu.get(i, j) * x[j];
            }
            x[i] = sum / self.lu.get(i, i);
        }
        x
    }
}

/// Solves `A x = b` by partial-pivoting LU. Supports unsymmetric `A`.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.rows(), b.len(), "system dimensions disagree");
    Ok(LuFactors::factorize(a)?.solve(b))
}

/// Singular values of a square matrix by one-sided Jacobi orthogonalization,
/// returned in descending order.
///
/// Columns of a working copy are rotated until every pair is orthogonal to a
/// relative tolerance of 1e-12; the column norms are then the singular values.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    assert!(a.is_square(), "SVD helper expects a square matrix");
    let n = a.rows();
    if n == 1 {
        return vec![a.get(0, 0).abs()];
    }
    // Column-major working copy.
    let mut u: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| a.get(i, j)).collect())
        .collect();
    const TOL: f64 = 1e-12;
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..n {
                    alpha += u[p][i] * u[p][i];
                    beta += u[q][i] * u[q][i];
                    gamma += u[p][i] * u[q][i];
                }
                if gamma.abs() <= TOL * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let up = u[p][i];
                    let uq = u[q][i];
                    u[p][i] = c * up - s * uq;
                    u[q][i] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = u
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// 2-norm condition number `sigma_max / sigma_min`, capped at [`KAPPA_CAP`].
///
/// A vanishing smallest singular value reports the cap itself, which callers
/// interpret as "numerically singular".
pub fn condition_number(a: &DenseMatrix) -> f64 {
    let sv = singular_values(a);
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    if smin < 1e-300 || !smin.is_finite() || !smax.is_finite() {
        return KAPPA_CAP;
    }
    (smax / smin).min(KAPPA_CAP)
}
