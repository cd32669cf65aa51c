use rand::Rng;

use super::{check_input, SketchError};
use crate::matrix::{DenseMatrix, Matrix};
use crate::rng::{stream_rng, STREAM_SPARSE_EMBEDDING};

/// CountSketch: input coordinate `i` lands in bucket `h(i)` with sign `σ(i)`.
///
/// Entries are ±1 with no rescaling, so `E[SᵀS] = I`. The matrix is never
/// materialised except through [`SparseEmbedding::to_dense`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEmbedding {
    sketch_dim: usize,
    buckets: Vec<usize>,
    signs: Vec<f64>,
    seed: Option<u64>,
}

impl SparseEmbedding {
    /// Draws `h` and `σ` uniformly from the `(seed, sparse-embedding)` stream.
    pub fn build(input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self, SketchError> {
        if sketch_dim == 0 {
            return Err(SketchError::ZeroSketchDim);
        }
        if input_dim == 0 {
            return Err(SketchError::ZeroInputDim);
        }
        let mut rng = stream_rng(seed, STREAM_SPARSE_EMBEDDING);
        let mut buckets = Vec::with_capacity(input_dim);
        let mut signs = Vec::with_capacity(input_dim);
        for _ in 0..input_dim {
            buckets.push(rng.gen_range(0..sketch_dim));
            signs.push(if rng.gen::<bool>() { 1.0 } else { -1.0 });
        }
        Ok(SparseEmbedding { sketch_dim, buckets, signs, seed: Some(seed) })
    }

    /// Explicit hash and signs; signs must be ±1.
    pub fn from_parts(sketch_dim: usize, buckets: Vec<usize>, signs: Vec<f64>) -> Result<Self, SketchError> {
        if sketch_dim == 0 {
            return Err(SketchError::ZeroSketchDim);
        }
        if buckets.is_empty() {
            return Err(SketchError::ZeroInputDim);
        }
        if buckets.len() != signs.len() {
            return Err(SketchError::DimensionMismatch {
                op: "sparse embedding parts",
                expected: buckets.len(),
                found: signs.len(),
            });
        }
        if let Some(&b) = buckets.iter().find(|&&b| b >= sketch_dim) {
            return Err(SketchError::InvalidParts(format!("bucket {b} outside 0..{sketch_dim}")));
        }
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(SketchError::InvalidParts("signs must be +1 or -1".into()));
        }
        Ok(SparseEmbedding { sketch_dim, buckets, signs, seed: None })
    }

    pub fn input_dim(&self) -> usize {
        self.buckets.len()
    }

    pub fn sketch_dim(&self) -> usize {
        self.sketch_dim
    }

    pub fn buckets(&self) -> &[usize] {
        &self.buckets
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `S · A` in one pass over the stored entries of `A`.
    pub fn apply_left(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        check_input("sparse embedding (left)", self.input_dim(), a.rows())?;
        let cols = a.cols();
        let mut out = DenseMatrix::zeros(self.sketch_dim, cols);
        match a {
            Matrix::Dense(d) => {
                for i in 0..d.rows() {
                    let sign = self.signs[i];
                    let dst = out.row_mut(self.buckets[i]);
                    for (o, &v) in dst.iter_mut().zip(d.row(i)) {
                        *o += sign * v;
                    }
                }
                *touched += (d.rows() * cols) as u64;
            }
            Matrix::Sparse(s) => {
                for i in 0..s.rows() {
                    let (idx, vals) = s.row(i);
                    if idx.is_empty() {
                        continue;
                    }
                    let sign = self.signs[i];
                    let dst = out.row_mut(self.buckets[i]);
                    for (&j, &v) in idx.iter().zip(vals) {
                        dst[j] += sign * v;
                    }
                }
                *touched += s.nnz() as u64;
            }
        }
        Ok(out)
    }

    /// `A · Sᵀ`: column `j` of `A` is added into column `h(j)` with sign `σ(j)`.
    pub fn apply_right(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        check_input("sparse embedding (right)", self.input_dim(), a.cols())?;
        let mut out = DenseMatrix::zeros(a.rows(), self.sketch_dim);
        match a {
            Matrix::Dense(d) => {
                for i in 0..d.rows() {
                    let dst = out.row_mut(i);
                    for (j, &v) in d.row(i).iter().enumerate() {
                        dst[self.buckets[j]] += self.signs[j] * v;
                    }
                }
                *touched += (d.rows() * d.cols()) as u64;
            }
            Matrix::Sparse(s) => {
                for i in 0..s.rows() {
                    let (idx, vals) = s.row(i);
                    let dst = out.row_mut(i);
                    for (&j, &v) in idx.iter().zip(vals) {
                        dst[self.buckets[j]] += self.signs[j] * v;
                    }
                }
                *touched += s.nnz() as u64;
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.sketch_dim, self.input_dim());
        for (i, (&b, &s)) in self.buckets.iter().zip(&self.signs).enumerate() {
            out[(b, i)] = s;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SparseMatrix;

    fn example() -> SparseEmbedding {
        // h = (1, 2, 1), σ = (+1, -1, +1) in one-based bucket notation.
        SparseEmbedding::from_parts(2, vec![0, 1, 0], vec![1.0, -1.0, 1.0]).unwrap()
    }

    #[test]
    fn standard_basis_column() {
        let e2 = Matrix::Dense(DenseMatrix::new(3, 1, vec![0.0, 1.0, 0.0]).unwrap());
        let out = example().apply_left(&e2, &mut 0).unwrap();
        assert_eq!(out.as_slice(), &[0.0, -1.0]);
    }

    #[test]
    fn direct_expansion() {
        let x = Matrix::Dense(DenseMatrix::new(3, 1, vec![1.0, 2.0, 3.0]).unwrap());
        assert_eq!(example().apply_left(&x, &mut 0).unwrap().as_slice(), &[4.0, -2.0]);
    }

    #[test]
    fn identity_image_has_one_signed_entry_per_column() {
        let s = SparseEmbedding::build(50, 7, 3).unwrap();
        let img = s.apply_left(&Matrix::Dense(DenseMatrix::identity(50)), &mut 0).unwrap();
        assert_eq!(img.nnz(), 50);
        assert!(img.as_slice().iter().all(|&v| v == 0.0 || v == 1.0 || v == -1.0));
        assert_eq!(img, s.to_dense());
    }

    #[test]
    fn injective_hash_gives_signed_permutation() {
        // Search seeds until the 3-bucket hash is injective.
        let s = (0..1000u64)
            .map(|seed| SparseEmbedding::build(3, 3, seed).unwrap())
            .find(|s| {
                let mut b = s.buckets().to_vec();
                b.sort_unstable();
                b == [0, 1, 2]
            })
            .expect("an injective seed exists");
        let p = s.apply_left(&Matrix::Dense(DenseMatrix::identity(3)), &mut 0).unwrap();
        let ptp = p.transpose().matmul(&p).unwrap();
        assert_eq!(ptp, DenseMatrix::identity(3));
    }

    #[test]
    fn deterministic_under_seed() {
        let a = SparseEmbedding::build(100, 9, 77).unwrap();
        let b = SparseEmbedding::build(100, 9, 77).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, SparseEmbedding::build(100, 9, 78).unwrap());
    }

    #[test]
    fn zero_sketch_dim_is_rejected() {
        assert_eq!(SparseEmbedding::build(4, 0, 1).unwrap_err(), SketchError::ZeroSketchDim);
    }

    #[test]
    fn right_application_matches_dense() {
        let s = SparseEmbedding::build(6, 4, 5).unwrap();
        let a = DenseMatrix::from_fn(3, 6, |i, j| (i as f64) - 0.5 * j as f64);
        let expect = a.matmul(&s.to_dense().transpose()).unwrap();
        assert_eq!(s.apply_right(&Matrix::Dense(a.clone()), &mut 0).unwrap(), expect);
        let sp = Matrix::Sparse(SparseMatrix::from_dense(&a));
        assert_eq!(s.apply_right(&sp, &mut 0).unwrap(), expect);
    }
}
