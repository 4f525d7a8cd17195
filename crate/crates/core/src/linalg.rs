//! Minimal dense-matrix support for the metric-learning path: square
//! matrices, quadratic forms, rank-one accumulation, and a cyclic Jacobi
//! eigendecomposition for symmetric matrices. The sizes involved are tens
//! of rows, where Jacobi is simple, robust and plenty fast.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// (A + Aᵀ) / 2.
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = 0.5 * (self.get(i, j) + self.get(j, i));
            }
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// dᵀ M d.
    #[inline]
    pub fn quadratic_form(&self, d: &[f64]) -> f64 {
        debug_assert!(self.is_square() && d.len() == self.rows);
        let n = self.rows;
        let mut total = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut dot = 0.0;
            for j in 0..n {
                dot += row[j] * d[j];
            }
            total += d[i] * dot;
        }
        total
    }

    /// M += w · d dᵀ.
    #[inline]
    pub fn add_scaled_outer(&mut self, w: f64, d: &[f64]) {
        debug_assert!(self.is_square() && d.len() == self.rows);
        let n = self.rows;
        for i in 0..n {
            let di = w * d[i];
            let row = &mut self.data[i * n..(i + 1) * n];
            for j in 0..n {
                row[j] += di * d[j];
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        for v in &mut self.data {
            *v *= a;
        }
    }

    pub fn add_scaled(&mut self, a: f64, other: &Matrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (x, y) in self.data.iter_mut().zip(other.data.iter()) {
            *x += a * y;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Strict Cholesky feasibility test: true iff the matrix admits an
    /// LLᵀ factorization, i.e. is (numerically) positive definite.
    pub fn cholesky_feasible(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut l = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return false;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        true
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns `(eigenvalues, eigenvectors)` with eigenvector `k` stored in
    /// column `k`; the input must be symmetric (callers symmetrize first).
    pub fn symmetric_eigen(&self) -> (Vec<f64>, Matrix) {
        assert!(self.is_square(), "eigendecomposition needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        let fro = self.frobenius_norm().max(f64::MIN_POSITIVE);
        let tol = 1e-14 * fro;
        for _sweep in 0..64 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.get(p, q).abs();
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let eigenvalues = (0..n).map(|i| a.get(i, i)).collect();
        (eigenvalues, v)
    }

    /// Rebuild V diag(w) Vᵀ.
    pub fn from_eigen(eigenvalues: &[f64], vectors: &Matrix) -> Matrix {
        let n = vectors.rows;
        let mut out = Matrix::zeros(n, n);
        for k in 0..n {
            let w = eigenvalues[k];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = vectors.get(i, k);
                if vik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += w * vik * vectors.get(j, k);
                }
            }
        }
        out
    }
}
