use rand_distr::{Distribution, StandardNormal};

use super::{check_input, SketchError};
use crate::matrix::{DenseMatrix, Matrix};
use crate::rng::{stream_rng, STREAM_GAUSSIAN};

/// Dense `s × t` sketch with i.i.d. `N(0, 1/s)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSketch {
    entries: DenseMatrix,
    seed: u64,
}

impl GaussianSketch {
    pub fn build(input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self, SketchError> {
        if sketch_dim == 0 {
            return Err(SketchError::ZeroSketchDim);
        }
        if input_dim == 0 {
            return Err(SketchError::ZeroInputDim);
        }
        let mut rng = stream_rng(seed, STREAM_GAUSSIAN);
        let scale = 1.0 / (sketch_dim as f64).sqrt();
        let entries = DenseMatrix::from_fn(sketch_dim, input_dim, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        });
        Ok(GaussianSketch { entries, seed })
    }

    pub fn input_dim(&self) -> usize {
        self.entries.cols()
    }

    pub fn sketch_dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn apply_left(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        check_input("gaussian sketch (left)", self.input_dim(), a.rows())?;
        *touched += a.stored_entries() as u64;
        Ok(a.left_mul(&self.entries)?)
    }

    /// `A · Gᵀ`.
    pub fn apply_right(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        check_input("gaussian sketch (right)", self.input_dim(), a.cols())?;
        *touched += a.stored_entries() as u64;
        Ok(a.right_mul(&self.entries.transpose())?)
    }
}
