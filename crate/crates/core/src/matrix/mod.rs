//! Dense and sparse matrix storage, products, norms and the SVD.

mod dense;
mod sparse;
mod svd;

pub use dense::DenseMatrix;
pub use sparse::SparseMatrix;
pub use svd::{pinv, pinv_from_factors, residual_norm, spec_norm, svd, SvdFactors, DEFAULT_RANK_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("{op}: shape mismatch between {left:?} and {right:?}")]
    ShapeMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("data length {len} does not match shape {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("svd did not converge after {sweeps} Jacobi sweeps")]
    SvdNoConvergence { sweeps: usize },
}

pub type Result<T> = std::result::Result<T, MatrixError>;

/// A matrix operand that may be stored densely or in compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.rows(),
            Matrix::Sparse(s) => s.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.cols(),
            Matrix::Sparse(s) => s.cols(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    /// Number of stored entries: `rows * cols` for dense storage, nnz for sparse.
    pub fn stored_entries(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.rows() * d.cols(),
            Matrix::Sparse(s) => s.nnz(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.nnz(),
            Matrix::Sparse(s) => s.nnz(),
        }
    }

    /// Random access to entry `(i, j)`. Logarithmic in the row length for sparse storage.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Matrix::Dense(d) => d[(i, j)],
            Matrix::Sparse(s) => s.get(i, j),
        }
    }

    pub fn fro_norm(&self) -> f64 {
        match self {
            Matrix::Dense(d) => d.fro_norm(),
            Matrix::Sparse(s) => s.fro_norm(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(d) => d.clone(),
            Matrix::Sparse(s) => s.to_dense(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        match self {
            Matrix::Dense(d) => Matrix::Dense(d.transpose()),
            Matrix::Sparse(s) => Matrix::Sparse(s.transpose()),
        }
    }

    /// `B · self` for a dense left factor.
    pub fn left_mul(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            Matrix::Dense(d) => b.matmul(d),
            Matrix::Sparse(s) => b.matmul_sparse(s),
        }
    }

    /// `self · B` for a dense right factor.
    pub fn right_mul(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            Matrix::Dense(d) => d.matmul(b),
            Matrix::Sparse(s) => s.matmul_dense(b),
        }
    }

    /// `max |a_ij − a_ji| ≤ tol` for a square matrix.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        match self {
            Matrix::Dense(d) => d.is_symmetric(tol),
            Matrix::Sparse(s) => s.rows() == s.cols() && s.iter().all(|(i, j, v)| (v - s.get(j, i)).abs() <= tol),
        }
    }

    /// Copy of row `i` as a dense vector.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match self {
            Matrix::Dense(d) => d.row(i).to_vec(),
            Matrix::Sparse(s) => {
                let mut out = vec![0.0; s.cols()];
                let (cols, vals) = s.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    out[j] = v;
                }
                out
            }
        }
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(d: DenseMatrix) -> Self {
        Matrix::Dense(d)
    }
}

impl From<SparseMatrix> for Matrix {
    fn from(s: SparseMatrix) -> Self {
        Matrix::Sparse(s)
    }
}
