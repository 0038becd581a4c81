//! Dense row-major matrices and minimum-norm least squares.

use alloc::vec::Vec;

use crate::error::Error;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    /// Builds from row slices, which must all have the same length.
    ///
    /// # Errors
    ///
    /// [`Error::Empty`] for no rows or zero-length rows;
    /// [`Error::DimensionMismatch`] for ragged rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, Error> {
        let first = rows.first().ok_or(Error::Empty {
            what: "matrix rows",
        })?;
        let cols = first.len();
        if cols == 0 {
            return Err(Error::Empty {
                what: "matrix columns",
            });
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "matrix row length",
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of column `c`.
    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Returns a copy with one extra column of ones on the right.
    pub fn with_ones_column(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            out.set(r, self.cols, 1.0);
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "vector length",
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// Least-squares solution with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    /// Minimum-norm coefficient vector.
    pub coefficients: Vec<f64>,
    /// Numerical rank of the design matrix.
    pub rank: usize,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plane rotation of columns `p < q` in place.
fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Minimum-norm least squares via one-sided Jacobi orthogonalization.
///
/// Rotations are applied to column pairs of the design until all pairs are
/// orthogonal to working precision; column norms then equal the singular
/// values, and singular values at or below `max(rows, cols) * eps * s_max`
/// are treated as zero. Among all coefficient vectors minimizing the
/// residual, the one with the smallest Euclidean norm is returned, so
/// rank-deficient systems still solve deterministically.
///
/// # Errors
///
/// [`Error::Empty`] for an empty design; [`Error::DimensionMismatch`] if
/// `targets` does not match the row count.
pub fn lstsq(design: &Matrix, targets: &[f64]) -> Result<LeastSquares, Error> {
    let m = design.rows();
    let n = design.cols();
    if m == 0 || n == 0 {
        return Err(Error::Empty {
            what: "design matrix",
        });
    }
    if targets.len() != m {
        return Err(Error::DimensionMismatch {
            what: "target length",
            expected: m,
            actual: targets.len(),
        });
    }

    let mut b: Vec<Vec<f64>> = (0..n).map(|c| design.col(c)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut e = alloc::vec![0.0; n];
            e[c] = 1.0;
            e
        })
        .collect();

    const MAX_SWEEPS: usize = 64;
    const ORTHO_TOL: f64 = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&b[p], &b[p]);
                let beta = dot(&b[q], &b[q]);
                let gamma = dot(&b[p], &b[q]);
                if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if libm::fabs(gamma) <= ORTHO_TOL * libm::sqrt(alpha * beta) {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_pair(&mut b, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let sigmas: Vec<f64> = b.iter().map(|col| libm::sqrt(dot(col, col))).collect();
    let sigma_max = sigmas.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let tol = sigma_max * f64::EPSILON * m.max(n) as f64;

    let mut coefficients = alloc::vec![0.0; n];
    let mut rank = 0;
    for k in 0..n {
        if sigmas[k] > tol && sigmas[k] > 0.0 {
            rank += 1;
            // b_k = u_k * sigma_k, so the projection coefficient is
            // (b_k . y) / sigma_k^2.
            let w = dot(&b[k], targets) / (sigmas[k] * sigmas[k]);
            for i in 0..n {
                coefficients[i] += v[k][i] * w;
            }
        }
    }

    let mut singular_values = sigmas;
    singular_values.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite norms"));
    Ok(LeastSquares {
        coefficients,
        rank,
        singular_values,
    })
}

/// [`lstsq`] without the diagnostics.
///
/// # Errors
///
/// Same as [`lstsq`].
pub fn solve_least_squares(design: &Matrix, targets: &[f64]) -> Result<Vec<f64>, Error> {
    lstsq(design, targets).map(|solution| solution.coefficients)
}
