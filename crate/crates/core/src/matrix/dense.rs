use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{MatrixError, Result, SparseMatrix};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting NaN and infinite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(MatrixError::DataLength { rows, cols, len: data.len() });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from a slice of equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::ShapeMismatch { op: "from_rows", left: (i, cols), right: (i, r.len()) });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Dense product `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(MatrixError::ShapeMismatch { op: "matmul", left: self.shape(), right: other.shape() });
        }
        let n = other.cols;
        let mut out = vec![0.0; self.rows * n];
        for (out_row, a_row) in out.chunks_mut(n.max(1)).zip(self.data.chunks(self.cols.max(1))) {
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseMatrix::from_vec_unchecked(self.rows, n, out))
    }

    /// Product `self · S` with a sparse right operand; cost O(rows · nnz(S) / S.rows).
    pub fn matmul_sparse(&self, other: &SparseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows() {
            return Err(MatrixError::ShapeMismatch { op: "matmul_sparse", left: self.shape(), right: other.shape() });
        }
        let n = other.cols();
        let mut out = vec![0.0; self.rows * n];
        for (out_row, a_row) in out.chunks_mut(n.max(1)).zip(self.data.chunks(self.cols.max(1))) {
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let (cols, vals) = other.row(k);
                for (&j, &v) in cols.iter().zip(vals) {
                    out_row[j] += a * v;
                }
            }
        }
        Ok(DenseMatrix::from_vec_unchecked(self.rows, n, out))
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(&self, other: &DenseMatrix, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<DenseMatrix> {
        if self.shape() != other.shape() {
            return Err(MatrixError::ShapeMismatch { op, left: self.shape(), right: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(DenseMatrix::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn scale(&self, alpha: f64) -> DenseMatrix {
        let data = self.data.iter().map(|v| v * alpha).collect();
        DenseMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }

    /// `sqrt(Σ a_ij²)`, accumulated with scaling to avoid overflow.
    pub fn fro_norm(&self) -> f64 {
        scaled_norm(self.data.iter().copied())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Columns `0..k` as a new matrix.
    pub fn leading_cols(&self, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, k, |i, j| self.data[i * self.cols + j])
    }

    /// Rows `0..k` as a new matrix.
    pub fn leading_rows(&self, k: usize) -> DenseMatrix {
        DenseMatrix::from_vec_unchecked(k, self.cols, self.data[..k * self.cols].to_vec())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

pub(crate) fn scaled_norm(values: impl Iterator<Item = f64>) -> f64 {
    let mut scale = 0.0_f64;
    let mut ssq = 1.0_f64;
    for v in values {
        if v != 0.0 {
            let a = v.abs();
            if scale < a {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    scale * ssq.sqrt()
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err();
        assert_eq!(err, MatrixError::NonFinite { row: 0, col: 1 });
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn identity_is_neutral() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64 - 2.5);
        assert_eq!(a.matmul(&DenseMatrix::identity(4)).unwrap(), a);
        assert_eq!(DenseMatrix::identity(3).matmul(&a).unwrap(), a);
    }

    #[test]
    fn row_times_column_is_dot() {
        let x = DenseMatrix::new(1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let y = DenseMatrix::new(3, 1, vec![4.0, -5.0, 6.0]).unwrap();
        assert_eq!(x.matmul(&y).unwrap().as_slice(), &[4.0 - 10.0 + 18.0]);
    }

    #[test]
    fn mismatch_names_both_shapes() {
        let err = DenseMatrix::zeros(2, 3).matmul(&DenseMatrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2, 3)"), "{msg}");
        assert_eq!(err, MatrixError::ShapeMismatch { op: "matmul", left: (2, 3), right: (2, 3) });
    }

    #[test]
    fn fro_norm_pythagorean() {
        assert_eq!(DenseMatrix::from_diag(&[3.0, 4.0]).fro_norm(), 5.0);
        assert_eq!(DenseMatrix::zeros(3, 2).fro_norm(), 0.0);
    }
}
