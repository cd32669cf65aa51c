mod common;

use common::{gaussian, max_abs_diff, mgs_q, random_sparse};
use gma_core::matrix::DEFAULT_RANK_TOL;
use gma_core::sketch::{compute_leverage_scores, ComposedSketch, GaussianSketch, LeverageScoreSketch, SparseEmbedding};
use gma_core::{DenseMatrix, Matrix, SketchOperator, SparseMatrix};
use proptest::prelude::*;

#[test]
fn bucket_histogram_is_uniform() {
    let (m, s) = (10_000, 100);
    let e = SparseEmbedding::build(m, s, 12345).unwrap();
    let mut counts = vec![0usize; s];
    for &b in e.buckets() {
        counts[b] += 1;
    }
    let mean = m as f64 / s as f64;
    let sd = (m as f64 * (1.0 / s as f64) * (1.0 - 1.0 / s as f64)).sqrt();
    assert!(counts.iter().all(|&c| (c as f64 - mean).abs() <= 5.0 * sd), "{counts:?}");
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
    let dof = (s - 1) as f64;
    assert!(chi2 <= dof + 5.0 * (2.0 * dof).sqrt(), "chi-square {chi2}");
    let plus = e.signs().iter().filter(|&&v| v > 0.0).count() as f64;
    assert!((plus - m as f64 / 2.0).abs() <= 5.0 * (m as f64 / 4.0).sqrt());
}

#[test]
fn sparse_embedding_on_sparse_input_matches_dense_reference() {
    let a = random_sparse(2000, 400, 100_000, 7);
    let e = SparseEmbedding::build(2000, 100, 8).unwrap();
    let reference = e.to_dense().matmul(&a.to_dense()).unwrap();
    let mut touched = 0;
    let got = e.apply_left(&Matrix::Sparse(a.clone()), &mut touched).unwrap();
    assert!(max_abs_diff(&got, &reference) <= 1e-12);
    assert_eq!(touched, 100_000);
}

#[test]
fn leverage_scores_match_qr_oracle() {
    let m = gaussian(50, 4, 21);
    let q = mgs_q(&m);
    let scores = compute_leverage_scores(&m, DEFAULT_RANK_TOL).unwrap();
    let total: f64 = scores.iter().sum();
    assert!((total - 1.0).abs() <= 1e-10);
    for (i, score) in scores.iter().enumerate() {
        let expect = q.row(i).iter().map(|v| v * v).sum::<f64>() / 4.0;
        assert!((score - expect).abs() <= 1e-9, "row {i}");
    }
}

#[test]
fn uniform_sampling_frequencies() {
    let n = 10;
    let s = LeverageScoreSketch::build(vec![0.1; n], 10_000, 5).unwrap();
    let mut counts = vec![0usize; n];
    for &i in s.indices() {
        counts[i] += 1;
    }
    let sd = (10_000.0f64 * 0.1 * 0.9).sqrt();
    assert!(counts.iter().all(|&c| (c as f64 - 1000.0).abs() <= 5.0 * sd), "{counts:?}");
}

#[test]
fn row_sampling_is_unbiased_for_gram_matrix() {
    let a = gaussian(20, 3, 31);
    let scores = compute_leverage_scores(&a, DEFAULT_RANK_TOL).unwrap();
    let gram = a.transpose().matmul(&a).unwrap();
    let am = Matrix::Dense(a);
    let mut acc = DenseMatrix::zeros(3, 3);
    let trials = 2000;
    for seed in 0..trials {
        let s = LeverageScoreSketch::build(scores.clone(), 10, seed).unwrap();
        let sa = s.apply_left(&am, &mut 0).unwrap();
        acc = acc.add(&sa.transpose().matmul(&sa).unwrap()).unwrap();
    }
    let mean = acc.scale(1.0 / trials as f64);
    assert!(max_abs_diff(&mean, &gram) <= 0.05 * gram.max_abs());
}

#[test]
fn leverage_application_matches_dense_omega_d() {
    let a = gaussian(40, 6, 2);
    let scores = compute_leverage_scores(&gaussian(40, 3, 3), DEFAULT_RANK_TOL).unwrap();
    let s = LeverageScoreSketch::build(scores, 15, 4).unwrap();
    let dense = s.to_dense();
    let expect = dense.matmul(&a).unwrap();
    assert!(max_abs_diff(&s.apply_left(&Matrix::Dense(a.clone()), &mut 0).unwrap(), &expect) <= 1e-14);
    let sp = Matrix::Sparse(SparseMatrix::from_dense(&a));
    let mut touched = 0;
    assert!(max_abs_diff(&s.apply_left(&sp, &mut touched).unwrap(), &expect) <= 1e-14);
    let sampled_nnz: usize = s.indices().iter().map(|&i| SparseMatrix::from_dense(&a).row(i).0.len()).sum();
    assert_eq!(touched as usize, sampled_nnz);
}

#[test]
fn right_application_agrees_with_explicit_transpose() {
    let a = gaussian(7, 60, 9);
    let ops: Vec<SketchOperator> = vec![
        SparseEmbedding::build(60, 11, 1).unwrap().into(),
        GaussianSketch::build(60, 5, 2).unwrap().into(),
        LeverageScoreSketch::build(vec![1.0 / 60.0; 60], 13, 3).unwrap().into(),
        ComposedSketch::build(60, 20, 6, 4).unwrap().into(),
        SketchOperator::Identity(60),
    ];
    for op in &ops {
        let expect = a.matmul(&op.to_dense().transpose()).unwrap();
        for input in [Matrix::Dense(a.clone()), Matrix::Sparse(SparseMatrix::from_dense(&a))] {
            let got = op.apply_right(&input).unwrap();
            assert!(max_abs_diff(&got, &expect) <= 1e-12, "{:?}", op.family());
        }
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let e: SketchOperator = SparseEmbedding::build(10, 3, 1).unwrap().into();
    assert!(e.apply_left(&Matrix::Dense(DenseMatrix::zeros(9, 2))).is_err());
    assert!(e.apply_right(&Matrix::Dense(DenseMatrix::zeros(2, 9))).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn identical_seeds_give_identical_structures(m in 1usize..300, s in 1usize..40, seed in any::<u64>()) {
        prop_assert_eq!(SparseEmbedding::build(m, s, seed).unwrap(), SparseEmbedding::build(m, s, seed).unwrap());
        prop_assert_eq!(GaussianSketch::build(m, s, seed).unwrap(), GaussianSketch::build(m, s, seed).unwrap());
        let scores = vec![1.0 / m as f64; m];
        prop_assert_eq!(
            LeverageScoreSketch::build(scores.clone(), s, seed).unwrap(),
            LeverageScoreSketch::build(scores, s, seed).unwrap()
        );
    }

    #[test]
    fn sparse_embedding_is_linear(m in 1usize..60, s in 1usize..10, seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let e = SparseEmbedding::build(m, s, seed).unwrap();
        let x = gaussian(m, 2, seed ^ 1);
        let y = gaussian(m, 2, seed ^ 2);
        let lhs = e.apply_left(&Matrix::Dense(x.scale(alpha).add(&y).unwrap()), &mut 0).unwrap();
        let rhs = e.apply_left(&Matrix::Dense(x), &mut 0).unwrap().scale(alpha)
            .add(&e.apply_left(&Matrix::Dense(y), &mut 0).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12 * (1.0 + lhs.max_abs()));
    }
}
