//! Sketch families, their fast application, and dimension planning.
//!
//! Each operator is an `s × n` linear map applied either on the left (`S·A`) or
//! on the right as a transpose (`A·Sᵀ`). The `touched` counters passed to the
//! application routines accumulate how many entries of the input were read.

mod gaussian;
mod leverage;
mod plan;
mod sparse_embedding;

pub use gaussian::GaussianSketch;
pub use leverage::{compute_leverage_scores, LeverageScoreSketch};
pub use plan::{plan_dims, Pipeline, SketchDims, SketchPlan};
pub use sparse_embedding::SparseEmbedding;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{DenseMatrix, Matrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SketchError {
    #[error("sketch dimension must be at least 1")]
    ZeroSketchDim,
    #[error("input dimension must be at least 1")]
    ZeroInputDim,
    #[error("{op}: sketch expects dimension {expected}, operand has {found}")]
    DimensionMismatch { op: &'static str, expected: usize, found: usize },
    #[error("no column space to sample")]
    NoColumnSpace,
    #[error("invalid leverage scores: {0}")]
    InvalidScores(String),
    #[error("invalid sketch parts: {0}")]
    InvalidParts(String),
    #[error("invalid sketch plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub(crate) fn check_input(op: &'static str, expected: usize, found: usize) -> Result<(), SketchError> {
    if expected != found {
        return Err(SketchError::DimensionMismatch { op, expected, found });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchFamily {
    Identity,
    Sparse,
    Gaussian,
    Leverage,
    Composed,
}

impl std::fmt::Display for SketchFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SketchFamily::Identity => "identity",
            SketchFamily::Sparse => "sparse",
            SketchFamily::Gaussian => "gaussian",
            SketchFamily::Leverage => "leverage",
            SketchFamily::Composed => "composed",
        };
        f.write_str(name)
    }
}

/// Gaussian projection applied after a sparse embedding: `S = G·Π`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedSketch {
    outer: GaussianSketch,
    inner: SparseEmbedding,
}

impl ComposedSketch {
    pub fn new(outer: GaussianSketch, inner: SparseEmbedding) -> Result<Self, SketchError> {
        check_input("composed sketch", outer.input_dim(), inner.sketch_dim())?;
        Ok(ComposedSketch { outer, inner })
    }

    /// `Π` is `t × m`, `G` is `s × t`; the two draw from different streams of `seed`.
    pub fn build(input_dim: usize, inner_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self, SketchError> {
        let inner = SparseEmbedding::build(input_dim, inner_dim, seed)?;
        let outer = GaussianSketch::build(inner_dim, sketch_dim, seed)?;
        Self::new(outer, inner)
    }

    pub fn outer(&self) -> &GaussianSketch {
        &self.outer
    }

    pub fn inner(&self) -> &SparseEmbedding {
        &self.inner
    }

    /// `G · (Π · A)`; only the `Π` stage reads `A`.
    pub fn apply_left(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        let pa = self.inner.apply_left(a, touched)?;
        Ok(self.outer.entries().matmul(&pa)?)
    }

    /// `(A · Πᵀ) · Gᵀ`.
    pub fn apply_right(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        let ap = self.inner.apply_right(a, touched)?;
        Ok(ap.matmul(&self.outer.entries().transpose())?)
    }
}

/// Any supported sketch, applied without materialising a dense `s × n` matrix
/// except for the Gaussian family, whose entries are the sketch itself.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchOperator {
    Identity(usize),
    Sparse(SparseEmbedding),
    Gaussian(GaussianSketch),
    Leverage(LeverageScoreSketch),
    Composed(ComposedSketch),
}

impl SketchOperator {
    pub fn family(&self) -> SketchFamily {
        match self {
            SketchOperator::Identity(_) => SketchFamily::Identity,
            SketchOperator::Sparse(_) => SketchFamily::Sparse,
            SketchOperator::Gaussian(_) => SketchFamily::Gaussian,
            SketchOperator::Leverage(_) => SketchFamily::Leverage,
            SketchOperator::Composed(_) => SketchFamily::Composed,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            SketchOperator::Identity(n) => *n,
            SketchOperator::Sparse(s) => s.input_dim(),
            SketchOperator::Gaussian(g) => g.input_dim(),
            SketchOperator::Leverage(l) => l.input_dim(),
            SketchOperator::Composed(c) => c.inner().input_dim(),
        }
    }

    pub fn sketch_dim(&self) -> usize {
        match self {
            SketchOperator::Identity(n) => *n,
            SketchOperator::Sparse(s) => s.sketch_dim(),
            SketchOperator::Gaussian(g) => g.sketch_dim(),
            SketchOperator::Leverage(l) => l.sketch_dim(),
            SketchOperator::Composed(c) => c.outer().sketch_dim(),
        }
    }

    pub fn apply_left(&self, a: &Matrix) -> Result<DenseMatrix, SketchError> {
        self.apply_left_counted(a, &mut 0)
    }

    pub fn apply_right(&self, a: &Matrix) -> Result<DenseMatrix, SketchError> {
        self.apply_right_counted(a, &mut 0)
    }

    /// `S · A`, adding the number of entries of `A` read to `touched`.
    pub fn apply_left_counted(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        match self {
            SketchOperator::Identity(n) => {
                check_input("identity sketch (left)", *n, a.rows())?;
                *touched += a.stored_entries() as u64;
                Ok(a.to_dense())
            }
            SketchOperator::Sparse(s) => s.apply_left(a, touched),
            SketchOperator::Gaussian(g) => g.apply_left(a, touched),
            SketchOperator::Leverage(l) => l.apply_left(a, touched),
            SketchOperator::Composed(c) => c.apply_left(a, touched),
        }
    }

    /// `A · Sᵀ`, adding the number of entries of `A` read to `touched`.
    pub fn apply_right_counted(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        match self {
            SketchOperator::Identity(n) => {
                check_input("identity sketch (right)", *n, a.cols())?;
                *touched += a.stored_entries() as u64;
                Ok(a.to_dense())
            }
            SketchOperator::Sparse(s) => s.apply_right(a, touched),
            SketchOperator::Gaussian(g) => g.apply_right(a, touched),
            SketchOperator::Leverage(l) => l.apply_right(a, touched),
            SketchOperator::Composed(c) => c.apply_right(a, touched),
        }
    }

    /// The sketch as an explicit `s × n` matrix. Intended for reference checks.
    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            SketchOperator::Identity(n) => DenseMatrix::identity(*n),
            SketchOperator::Sparse(s) => s.to_dense(),
            SketchOperator::Gaussian(g) => g.entries().clone(),
            SketchOperator::Leverage(l) => l.to_dense(),
            SketchOperator::Composed(c) => {
                c.outer().entries().matmul(&c.inner().to_dense()).expect("composed dims checked at construction")
            }
        }
    }
}

impl From<SparseEmbedding> for SketchOperator {
    fn from(s: SparseEmbedding) -> Self {
        SketchOperator::Sparse(s)
    }
}

impl From<GaussianSketch> for SketchOperator {
    fn from(g: GaussianSketch) -> Self {
        SketchOperator::Gaussian(g)
    }
}

impl From<LeverageScoreSketch> for SketchOperator {
    fn from(l: LeverageScoreSketch) -> Self {
        SketchOperator::Leverage(l)
    }
}

impl From<ComposedSketch> for SketchOperator {
    fn from(c: ComposedSketch) -> Self {
        SketchOperator::Composed(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SparseMatrix;

    #[test]
    fn composed_rejects_chained_mismatch() {
        let inner = SparseEmbedding::build(20, 6, 1).unwrap();
        let outer = GaussianSketch::build(5, 3, 1).unwrap();
        assert_eq!(
            ComposedSketch::new(outer, inner).unwrap_err(),
            SketchError::DimensionMismatch { op: "composed sketch", expected: 5, found: 6 }
        );
    }

    #[test]
    fn composed_matches_dense_product() {
        let c = ComposedSketch::build(30, 12, 5, 8).unwrap();
        let a = DenseMatrix::from_fn(30, 4, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let expect = c.outer().entries().matmul(&c.inner().to_dense()).unwrap().matmul(&a).unwrap();
        let got = c.apply_left(&Matrix::Dense(a), &mut 0).unwrap();
        assert!(got.sub(&expect).unwrap().max_abs() <= 1e-12 * expect.max_abs().max(1.0));
    }

    #[test]
    fn composed_zero_input() {
        let c = ComposedSketch::build(10, 6, 3, 2).unwrap();
        let out = c.apply_left(&Matrix::Dense(DenseMatrix::zeros(10, 2)), &mut 0).unwrap();
        assert_eq!(out, DenseMatrix::zeros(3, 2));
    }

    #[test]
    fn composed_touches_each_stored_entry_once() {
        let c = ComposedSketch::build(40, 10, 4, 2).unwrap();
        let a = SparseMatrix::from_triplets(40, 7, (0..40).map(|i| (i, (i * 3) % 7, 1.0 + i as f64))).unwrap();
        let mut touched = 0;
        c.apply_left(&Matrix::Sparse(a.clone()), &mut touched).unwrap();
        assert_eq!(touched, a.nnz() as u64);
    }

    #[test]
    fn identity_requires_matching_dims() {
        let err = SketchOperator::Identity(3).apply_left(&Matrix::Dense(DenseMatrix::zeros(4, 1))).unwrap_err();
        assert!(matches!(err, SketchError::DimensionMismatch { .. }));
    }
}
