#![allow(dead_code)]

use gma_core::rng::stream_rng;
use gma_core::{DenseMatrix, SparseMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = stream_rng(seed, 1000);
    DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}

/// Random sparse matrix with exactly `nnz` distinct entries.
pub fn random_sparse(rows: usize, cols: usize, nnz: usize, seed: u64) -> SparseMatrix {
    let mut rng = stream_rng(seed, 1001);
    let mut seen = std::collections::HashSet::with_capacity(nnz);
    let mut triplets = Vec::with_capacity(nnz);
    while triplets.len() < nnz {
        let (i, j) = (rng.gen_range(0..rows), rng.gen_range(0..cols));
        if seen.insert((i, j)) {
            let v: f64 = StandardNormal.sample(&mut rng);
            triplets.push((i, j, v + if v >= 0.0 { 0.1 } else { -0.1 }));
        }
    }
    SparseMatrix::from_triplets(rows, cols, triplets).unwrap()
}

/// Modified Gram-Schmidt, applied twice, returning `Q` with orthonormal columns
/// spanning the columns of `a` (assumed full column rank).
pub fn mgs_q(a: &DenseMatrix) -> DenseMatrix {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    for _ in 0..2 {
        for k in 0..n {
            for l in 0..k {
                let p: f64 = (0..m).map(|i| cols[l][i] * cols[k][i]).sum();
                let (head, tail) = cols.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[l]) {
                    *x -= p * y;
                }
            }
            let nk = cols[k].iter().map(|v| v * v).sum::<f64>().sqrt();
            cols[k].iter_mut().for_each(|v| *v /= nk);
        }
    }
    DenseMatrix::from_fn(m, n, |i, j| cols[j][i])
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

/// Entrywise `‖A − M·X·N‖_F` by direct triple summation.
pub fn brute_force_residual(a: &DenseMatrix, m: &DenseMatrix, x: &DenseMatrix, n: &DenseMatrix) -> f64 {
    let mut total = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let mut approx = 0.0;
            for k in 0..x.rows() {
                for l in 0..x.cols() {
                    approx += m[(i, k)] * x[(k, l)] * n[(l, j)];
                }
            }
            let d = a[(i, j)] - approx;
            total += d * d;
        }
    }
    total.sqrt()
}
