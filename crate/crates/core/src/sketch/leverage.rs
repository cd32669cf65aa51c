use rand::distributions::{Distribution, WeightedIndex};

use super::{check_input, SketchError};
use crate::matrix::{svd, DenseMatrix, Matrix};
use crate::rng::{stream_rng, STREAM_LEVERAGE};

/// Row-sampling sketch `S = ΩD`: row `j` of `S·A` is `D_j · A[Ω_j, :]` with
/// `Ω_j ~ ℓ` drawn with replacement and `D_j = 1/sqrt(ℓ_{Ω_j} · r_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeverageScoreSketch {
    scores: Vec<f64>,
    indices: Vec<usize>,
    scales: Vec<f64>,
    seed: Option<u64>,
}

/// Leverage scores of the column space of `m`: `ℓ_i = ‖U[i, :]‖² / k`, where `U`
/// holds the `k` left singular vectors above the rank threshold.
pub fn compute_leverage_scores(m: &DenseMatrix, rank_tol: f64) -> Result<Vec<f64>, SketchError> {
    let f = svd(m, rank_tol)?;
    let k = f.rank();
    if k == 0 {
        return Err(SketchError::NoColumnSpace);
    }
    Ok((0..m.rows()).map(|i| f.u.row(i).iter().map(|v| v * v).sum::<f64>() / k as f64).collect())
}

fn validate_scores(scores: &[f64]) -> Result<(), SketchError> {
    if scores.is_empty() {
        return Err(SketchError::ZeroInputDim);
    }
    if scores.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(SketchError::InvalidScores("scores must be finite and nonnegative".into()));
    }
    let total: f64 = scores.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(SketchError::InvalidScores(format!("scores sum to {total}, expected 1")));
    }
    Ok(())
}

impl LeverageScoreSketch {
    /// Samples `sample_count` indices i.i.d. from `scores` using the
    /// `(seed, leverage)` stream.
    pub fn build(scores: Vec<f64>, sample_count: usize, seed: u64) -> Result<Self, SketchError> {
        if sample_count == 0 {
            return Err(SketchError::ZeroSketchDim);
        }
        validate_scores(&scores)?;
        let dist = WeightedIndex::new(&scores).map_err(|e| SketchError::InvalidScores(e.to_string()))?;
        let mut rng = stream_rng(seed, STREAM_LEVERAGE);
        let indices: Vec<usize> = (0..sample_count).map(|_| dist.sample(&mut rng)).collect();
        let scales = indices.iter().map(|&i| 1.0 / (scores[i] * sample_count as f64).sqrt()).collect();
        Ok(LeverageScoreSketch { scores, indices, scales, seed: Some(seed) })
    }

    /// Fixed sample indices; scales follow from `scores` and the sample count.
    pub fn from_indices(scores: Vec<f64>, indices: Vec<usize>) -> Result<Self, SketchError> {
        validate_scores(&scores)?;
        if indices.is_empty() {
            return Err(SketchError::ZeroSketchDim);
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= scores.len() || scores[i] <= 0.0) {
            return Err(SketchError::InvalidParts(format!("index {i} has no probability mass")));
        }
        let r = indices.len() as f64;
        let scales = indices.iter().map(|&i| 1.0 / (scores[i] * r).sqrt()).collect();
        Ok(LeverageScoreSketch { scores, indices, scales, seed: None })
    }

    pub fn input_dim(&self) -> usize {
        self.scores.len()
    }

    pub fn sketch_dim(&self) -> usize {
        self.indices.len()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Reads only the sampled rows of `A`.
    pub fn apply_left(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        check_input("leverage sketch (left)", self.input_dim(), a.rows())?;
        let mut out = DenseMatrix::zeros(self.sketch_dim(), a.cols());
        for (j, (&i, &d)) in self.indices.iter().zip(&self.scales).enumerate() {
            let dst = out.row_mut(j);
            match a {
                Matrix::Dense(m) => {
                    for (o, &v) in dst.iter_mut().zip(m.row(i)) {
                        *o = d * v;
                    }
                    *touched += m.cols() as u64;
                }
                Matrix::Sparse(s) => {
                    let (cols, vals) = s.row(i);
                    for (&c, &v) in cols.iter().zip(vals) {
                        dst[c] = d * v;
                    }
                    *touched += cols.len() as u64;
                }
            }
        }
        Ok(out)
    }

    /// `A · Sᵀ`: column `j` is `D_j · A[:, Ω_j]`, read through random access.
    pub fn apply_right(&self, a: &Matrix, touched: &mut u64) -> Result<DenseMatrix, SketchError> {
        check_input("leverage sketch (right)", self.input_dim(), a.cols())?;
        let mut out = DenseMatrix::zeros(a.rows(), self.sketch_dim());
        for i in 0..a.rows() {
            let dst = out.row_mut(i);
            for (o, (&c, &d)) in dst.iter_mut().zip(self.indices.iter().zip(&self.scales)) {
                *o = d * a.get(i, c);
            }
        }
        *touched += (a.rows() * self.sketch_dim()) as u64;
        Ok(out)
    }

    /// `S_left · A · S_rightᵀ` read entrywise: exactly `s_left · s_right` probes of `A`.
    pub fn sample_both_sides(
        left: &LeverageScoreSketch,
        a: &Matrix,
        right: &LeverageScoreSketch,
        touched: &mut u64,
    ) -> Result<DenseMatrix, SketchError> {
        check_input("leverage sketch (left)", left.input_dim(), a.rows())?;
        check_input("leverage sketch (right)", right.input_dim(), a.cols())?;
        let mut out = DenseMatrix::zeros(left.sketch_dim(), right.sketch_dim());
        for (j, (&i, &dl)) in left.indices.iter().zip(&left.scales).enumerate() {
            let dst = out.row_mut(j);
            for (o, (&c, &dr)) in dst.iter_mut().zip(right.indices.iter().zip(&right.scales)) {
                *o = dl * dr * a.get(i, c);
            }
        }
        *touched += (left.sketch_dim() * right.sketch_dim()) as u64;
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.sketch_dim(), self.input_dim());
        for (j, (&i, &d)) in self.indices.iter().zip(&self.scales).enumerate() {
            out[(j, i)] = d;
        }
        out
    }
}
