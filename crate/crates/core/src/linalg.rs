//! Row-major dense matrix and the symmetric positive-definite solve used by
//! the w-update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// New matrix holding the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o = dot(row, v);
        }
    }

    /// `self^T * v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, self.row(i), &mut out);
            }
        }
        out
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solves `M x = rhs` in place for a symmetric positive-definite `M` stored
/// row-major as `dim x dim` in `mat`. Only the lower triangle of `mat` is
/// read; it is overwritten by the Cholesky factor.
pub fn cholesky_solve(mat: &mut [f64], dim: usize, rhs: &mut [f64]) -> Result<()> {
    debug_assert_eq!(mat.len(), dim * dim);
    debug_assert_eq!(rhs.len(), dim);

    for j in 0..dim {
        let mut d = mat[j * dim + j];
        for k in 0..j {
            d -= mat[j * dim + k] * mat[j * dim + k];
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err(Error::LinearSolve);
        }
        let d = d.sqrt();
        mat[j * dim + j] = d;
        for i in j + 1..dim {
            let mut s = mat[i * dim + j];
            for k in 0..j {
                s -= mat[i * dim + k] * mat[j * dim + k];
            }
            mat[i * dim + j] = s / d;
        }
    }

    // L y = rhs
    for i in 0..dim {
        let mut s = rhs[i];
        for k in 0..i {
            s -= mat[i * dim + k] * rhs[k];
        }
        rhs[i] = s / mat[i * dim + i];
    }
    // L^T x = y
    for i in (0..dim).rev() {
        let mut s = rhs[i];
        for k in i + 1..dim {
            s -= mat[k * dim + i] * rhs[k];
        }
        rhs[i] = s / mat[i * dim + i];
    }
    if rhs.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::LinearSolve)
    }
}
