mod common;

use gma_core::matrix::DenseMatrix;
use gma_core::rng::stream_rng;
use gma_core::sketch::{SketchError, SketchPlan, SparseEmbedding};
use gma_core::synth::SyntheticSpec;
use gma_core::verify::{
    check_embedding, check_fro_norm, check_fro_norm_on, check_gma_ratio, check_product, check_product_on,
    ProductShapes, RatioMethod, SketchSource, SketchSpec,
};
use gma_core::SketchOperator;
use rand::seq::SliceRandom;
use rand::Rng;

/// Sparse embedding with `s = m` whose hash is a random permutation, i.e. a
/// signed permutation matrix. It is an isometry, so every check must pass.
struct SignedPermutation;

impl SketchSource for SignedPermutation {
    fn draw(&self, m: usize, seed: u64, _: &DenseMatrix) -> Result<SketchOperator, SketchError> {
        let mut rng = stream_rng(seed, 1000);
        let mut buckets: Vec<usize> = (0..m).collect();
        buckets.shuffle(&mut rng);
        let signs = (0..m).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        Ok(SparseEmbedding::from_parts(m, buckets, signs)?.into())
    }

    fn describe(&self) -> String {
        "signed-permutation".into()
    }
}

#[test]
fn isometry_always_passes_embedding() {
    let r = check_embedding(&SignedPermutation, 200, 5, 0.01, 40, 1).unwrap();
    assert_eq!(r.passes, r.trials);
    assert!(r.worst_violation <= 1e-12);
    assert!(r.verdict);
}

#[test]
fn tiny_sparse_sketch_fails_embedding_more_often() {
    let (m, d, eps) = (2000, 5, 0.5);
    let tiny = check_embedding(&SketchSpec::Sparse { s: d }, m, d, eps, 60, 2).unwrap();
    let ample = check_embedding(&SketchSpec::Sparse { s: 4 * d * d * 10 }, m, d, eps, 60, 2).unwrap();
    assert!(tiny.pass_rate() < ample.pass_rate());
    assert!(!tiny.verdict);
}

#[test]
fn identity_sketch_is_exact_for_every_property() {
    let e = check_embedding(&SketchSpec::Identity, 100, 4, 1e-9, 10, 3).unwrap();
    let shapes = ProductShapes { rows: 80, a_cols: 4, b_cols: 3 };
    let p = check_product(&SketchSpec::Identity, shapes, 1e-9, 1.0, 10, 3, false).unwrap();
    let f = check_fro_norm(&SketchSpec::Identity, 80, 6, 1e-9, 10, 3).unwrap();
    for r in [e, p, f] {
        assert_eq!(r.passes, r.trials, "{}", r.property);
    }
}

#[test]
fn zero_b_product_passes() {
    let r = check_product_on(&SketchSpec::Sparse { s: 5 }, 0.1, 1.0, 20, 4, |ts| {
        Ok((common::gaussian(300, 3, ts), DenseMatrix::zeros(300, 2)))
    })
    .unwrap();
    assert_eq!(r.passes, r.trials);
    assert_eq!(r.worst_violation, 0.0);
}

#[test]
fn zero_matrix_preserves_frobenius_norm() {
    let r = check_fro_norm_on(&SketchSpec::Gaussian { s: 3 }, 0.01, 15, 5, |_| Ok(DenseMatrix::zeros(50, 4))).unwrap();
    assert_eq!(r.passes, r.trials);
}

#[test]
fn seed_determinism_and_thread_independence() {
    let spec = SketchSpec::Gaussian { s: 40 };
    let a = check_fro_norm(&spec, 200, 5, 0.3, 24, 9).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| check_fro_norm(&spec, 200, 5, 0.3, 24, 9).unwrap());
    assert_eq!(a, b);
}

#[test]
fn gma_ratio_control_and_pipelines() {
    let spec = SyntheticSpec::dense(300, 300, 4, 4, 0.5);
    let plan = SketchPlan::new(0.5, 0);
    let control = check_gma_ratio(&spec, RatioMethod::IdentitySketch, &plan, 10, 1).unwrap();
    assert_eq!(control.passes, control.trials);
    assert!(control.worst_violation <= 1.0 + 1e-9);
    for method in [RatioMethod::SparseGaussian, RatioMethod::Leverage] {
        let r = check_gma_ratio(&spec, method, &plan, 20, 2).unwrap();
        assert!(r.verdict, "{method}: {}/{}", r.passes, r.trials);
    }
    let sym = SyntheticSpec::symmetric(300, 4, 0.5);
    let r = check_gma_ratio(&sym, RatioMethod::SymmetricSparseGaussian, &plan, 20, 3).unwrap();
    assert!(r.verdict, "{}/{}", r.passes, r.trials);
}

#[test]
fn report_serialises_to_json() {
    let r = check_fro_norm(&SketchSpec::Sparse { s: 50 }, 300, 3, 0.5, 8, 1).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: gma_core::verify::PropertyReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}
