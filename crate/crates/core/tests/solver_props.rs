mod common;

use common::{gaussian, max_abs_diff};
use gma_core::sketch::{Pipeline, SketchPlan};
use gma_core::solver::{error_ratio, solve_exact, solve_lev_score, solve_sketched, solve_sps_gauss, solve_symmetric};
use gma_core::synth::{generate, SyntheticSpec};
use gma_core::{DenseMatrix, GmaProblem, Matrix, Method, SketchOperator, SparseMatrix};
use proptest::prelude::*;

fn random_problem(m: usize, n: usize, c: usize, r: usize, seed: u64) -> GmaProblem {
    GmaProblem::new(gaussian(m, n, seed), gaussian(m, c, seed + 1), gaussian(r, n, seed + 2)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pythagorean_identity(m in 6usize..=30, n in 6usize..=25, c in 1usize..=6, r in 1usize..=6, seed in any::<u64>()) {
        let p = random_problem(m, n, c, r, seed);
        let star = solve_exact(&p).unwrap();
        let w = gaussian(c, r, seed ^ 0xABCD);
        let perturbed = star.x.add(&w).unwrap();
        let lhs = p.residual(&perturbed).unwrap().powi(2);
        let mwn = p.m().matmul(&w).unwrap().matmul(p.n()).unwrap().fro_norm();
        let rhs = star.residual.powi(2) + mwn * mwn;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs);
    }

    #[test]
    fn normal_equations(m in 6usize..=30, n in 6usize..=25, c in 1usize..=6, r in 1usize..=6, seed in any::<u64>()) {
        let p = random_problem(m, n, c, r, seed);
        let star = solve_exact(&p).unwrap();
        let a = p.a().to_dense();
        let fit = p.m().matmul(&star.x).unwrap().matmul(p.n()).unwrap();
        let g = p.m().transpose().matmul(&a.sub(&fit).unwrap()).unwrap().matmul(&p.n().transpose()).unwrap();
        let scale = p.m().fro_norm() * a.fro_norm() * p.n().fro_norm();
        prop_assert!(g.fro_norm() <= 1e-8 * scale);
    }

    #[test]
    fn exact_ratio_is_one(m in 4usize..=20, n in 4usize..=20, c in 1usize..=4, r in 1usize..=4, seed in any::<u64>()) {
        let p = random_problem(m, n, c, r, seed);
        let star = solve_exact(&p).unwrap();
        prop_assert_eq!(error_ratio(&p, &star).unwrap(), 1.0);
        let sketched = solve_sps_gauss(&p, &SketchPlan::new(0.5, seed)).unwrap();
        prop_assert!(error_ratio(&p, &sketched).unwrap() >= 1.0 - 1e-8);
    }
}

#[test]
fn identity_sketches_reproduce_exact() {
    for seed in 0..10 {
        let p = random_problem(25, 18, 4, 3, seed * 7);
        let exact = solve_exact(&p).unwrap();
        let sk = solve_sketched(&p, &SketchOperator::Identity(25), &SketchOperator::Identity(18)).unwrap();
        assert!(max_abs_diff(&sk.x, &exact.x) <= 1e-10 * exact.x.max_abs());
        assert!((sk.residual - exact.residual).abs() <= 1e-10 * exact.residual);
    }
}

#[test]
fn consistent_system_is_recovered_by_both_pipelines() {
    let inst = generate(&SyntheticSpec::dense(300, 250, 5, 4, 0.0), 11).unwrap();
    let plan = SketchPlan::new(0.5, 3);
    for sol in [solve_sps_gauss(&inst.problem, &plan).unwrap(), solve_lev_score(&inst.problem, &plan).unwrap()] {
        assert!(sol.warnings.is_empty(), "{:?}", sol.warnings);
        assert!(max_abs_diff(&sol.x, &inst.x0) <= 1e-6, "{}", sol.method);
        assert_eq!(error_ratio(&inst.problem, &sol).unwrap(), 1.0);
    }
}

#[test]
fn orthonormal_m_with_uniform_scores_consistent_system() {
    // M has orthonormal columns with equal row norms, so its leverage scores are uniform.
    let m = DenseMatrix::from_fn(64, 2, |i, j| {
        let sign = if (i >> j) & 1 == 0 { 1.0 } else { -1.0 };
        sign / 8.0
    });
    let n = gaussian(3, 50, 4);
    let x0 = gaussian(2, 3, 5);
    let a = m.matmul(&x0).unwrap().matmul(&n).unwrap();
    let p = GmaProblem::new(a.clone(), m, n).unwrap();
    let sol = solve_lev_score(&p, &SketchPlan::new(0.5, 9)).unwrap();
    assert!(sol.residual <= 1e-8 * a.fro_norm());
}

#[test]
fn leverage_touches_exactly_the_sampled_entries() {
    let inst = generate(&SyntheticSpec::dense(200, 180, 4, 3, 0.5), 2).unwrap();
    let sol = solve_lev_score(&inst.problem, &SketchPlan::new(0.25, 4)).unwrap();
    let dims = sol.dims_used.unwrap();
    assert_eq!(sol.entries_touched, (dims.s_c * dims.s_r) as u64);
    assert_eq!(sol.method, Method::Leverage);
}

#[test]
fn sparse_input_composed_pipeline_touches_nnz() {
    let spec = SyntheticSpec { density: Some(0.1), ..SyntheticSpec::dense(300, 300, 3, 3, 0.5) };
    let inst = generate(&spec, 5).unwrap();
    let sol = solve_sps_gauss(&inst.problem, &SketchPlan::new(0.5, 1)).unwrap();
    assert_eq!(sol.entries_touched, inst.problem.a().nnz() as u64);
    let dense =
        GmaProblem::new(inst.problem.a().to_dense(), inst.problem.m().clone(), inst.problem.n().clone()).unwrap();
    let sol_dense = solve_sps_gauss(&dense, &SketchPlan::new(0.5, 1)).unwrap();
    assert!(max_abs_diff(&sol.x, &sol_dense.x) <= 1e-10 * sol.x.max_abs());
}

#[test]
fn sparse_and_dense_storage_agree_for_leverage() {
    let a = gaussian(80, 70, 1);
    let (m, n) = (gaussian(80, 3, 2), gaussian(2, 70, 3));
    let plan = SketchPlan::new(0.5, 8);
    let dense = solve_lev_score(&GmaProblem::new(a.clone(), m.clone(), n.clone()).unwrap(), &plan).unwrap();
    let sparse = solve_lev_score(&GmaProblem::new(SparseMatrix::from_dense(&a), m, n).unwrap(), &plan).unwrap();
    assert_eq!(dense.x, sparse.x);
}

#[test]
fn pipelines_are_deterministic_under_seed() {
    let inst = generate(&SyntheticSpec::dense(150, 120, 3, 3, 0.5), 6).unwrap();
    let plan = SketchPlan::new(0.25, 77);
    assert_eq!(solve_sps_gauss(&inst.problem, &plan).unwrap().x, solve_sps_gauss(&inst.problem, &plan).unwrap().x);
    assert_eq!(solve_lev_score(&inst.problem, &plan).unwrap().x, solve_lev_score(&inst.problem, &plan).unwrap().x);
}

#[test]
fn huge_sketches_approach_exact_accuracy() {
    let inst = generate(&SyntheticSpec::dense(400, 400, 4, 4, 0.5), 8).unwrap();
    let mut plan = SketchPlan::new(0.02, 5);
    plan.c_embed = 1.0;
    plan.c_prod = 2.0;
    let sol = solve_sps_gauss(&inst.problem, &plan).unwrap();
    assert!(sol.dims_used.unwrap().s_c >= 400);
    let ratio = error_ratio(&inst.problem, &sol).unwrap();
    assert!(ratio <= 1.01, "ratio {ratio}");
}

#[test]
fn noisy_instances_meet_relative_error() {
    let spec = SyntheticSpec::dense(1000, 1000, 8, 8, 0.5);
    let mut ok = 0;
    let trials = 10;
    for seed in 0..trials {
        let inst = generate(&spec, seed).unwrap();
        let sol = solve_sps_gauss(&inst.problem, &SketchPlan::new(0.25, seed + 100)).unwrap();
        if error_ratio(&inst.problem, &sol).unwrap() <= 1.25 {
            ok += 1;
        }
    }
    assert!(ok >= 9, "{ok}/{trials}");
}

#[test]
fn symmetric_variant() {
    let inst = generate(&SyntheticSpec::symmetric(200, 4, 0.0), 3).unwrap();
    let p = &inst.problem;
    for pipeline in [Pipeline::SparseGaussian, Pipeline::Leverage] {
        let sol = solve_symmetric(p.a().clone(), p.m().clone(), &SketchPlan::new(0.5, 2), pipeline).unwrap();
        assert!(sol.symmetric);
        assert_eq!(sol.x, sol.x.transpose());
        assert!(max_abs_diff(&sol.x, &inst.x0) <= 1e-6);
    }
    let noisy = generate(&SyntheticSpec::symmetric(300, 4, 0.5), 4).unwrap();
    let np = &noisy.problem;
    let sol =
        solve_symmetric(np.a().clone(), np.m().clone(), &SketchPlan::new(0.25, 1), Pipeline::SparseGaussian).unwrap();
    assert_eq!(sol.x, sol.x.transpose());
    assert!(error_ratio(np, &sol).unwrap() <= 1.25);
}

#[test]
fn rank_deficient_sketch_is_flagged_not_fatal() {
    let p = random_problem(30, 20, 4, 3, 1);
    // A 2-row sampling sketch cannot keep four columns of M independent.
    let s_m = gma_core::sketch::LeverageScoreSketch::build(vec![1.0 / 30.0; 30], 2, 1).unwrap();
    let sol = solve_sketched(&p, &s_m.into(), &SketchOperator::Identity(20)).unwrap();
    assert_eq!(sol.warnings.len(), 1);
    assert!(sol.warnings[0].contains("rank"));
    assert!(sol.residual.is_finite());
}

#[test]
fn median_ratio_does_not_improve_with_smaller_sketches() {
    let spec = SyntheticSpec::dense(300, 300, 4, 4, 0.5);
    let inst = generate(&spec, 21).unwrap();
    let median = |eps: f64| {
        let mut ratios: Vec<f64> = (0..50)
            .map(|seed| {
                let sol = solve_sps_gauss(&inst.problem, &SketchPlan::new(eps, seed)).unwrap();
                error_ratio(&inst.problem, &sol).unwrap()
            })
            .collect();
        ratios.sort_by(f64::total_cmp);
        0.5 * (ratios[24] + ratios[25])
    };
    assert!(median(0.5) >= median(0.1));
}

#[test]
fn zero_a_is_handled() {
    let p = GmaProblem::new(
        Matrix::Sparse(SparseMatrix::from_triplets(10, 8, []).unwrap()),
        gaussian(10, 2, 1),
        gaussian(2, 8, 2),
    )
    .unwrap();
    let sol = solve_sps_gauss(&p, &SketchPlan::new(0.5, 1)).unwrap();
    assert_eq!(sol.residual, 0.0);
    assert_eq!(error_ratio(&p, &sol).unwrap(), 1.0);
}
