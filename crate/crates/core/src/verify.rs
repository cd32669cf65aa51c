//! Monte Carlo certificates for the sketch properties and the solver guarantee.
//!
//! Each checker runs independent seeded trials (in parallel; the per-trial seed
//! is `derive_seed(seed, trial)`, so results do not depend on thread count),
//! records a pass/fail verdict per trial and compares the pass fraction with a
//! threshold. Checkers only use public operations.
//!
//! Default thresholds are conventions standing in for "with high probability":
//! 0.95 for subspace embeddings and 0.9 for everything else.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::{svd, DenseMatrix, Matrix, DEFAULT_RANK_TOL};
use crate::rng::{derive_seed, stream_rng, STREAM_VERIFY};
use crate::sketch::{
    compute_leverage_scores, ComposedSketch, GaussianSketch, LeverageScoreSketch, Pipeline, SketchError, SketchFamily,
    SketchOperator, SketchPlan, SparseEmbedding,
};
use crate::solver::{
    ratio_from_residuals, solve_exact, solve_lev_score, solve_sketched, solve_sps_gauss, solve_symmetric, SolveError,
};
use crate::synth::{generate, SyntheticSpec};

pub const EMBEDDING_THRESHOLD: f64 = 0.95;
pub const DEFAULT_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub subject: String,
    pub trials: usize,
    pub passes: usize,
    pub threshold: f64,
    /// Largest value of the checked statistic over all trials, in the units of
    /// its bound (distortion, relative product error, error ratio, ...).
    pub worst_violation: f64,
    pub bound: f64,
    pub seed: u64,
    pub verdict: bool,
}

impl PropertyReport {
    pub fn new(
        property: impl Into<String>,
        subject: impl Into<String>,
        outcomes: &[(bool, f64)],
        threshold: f64,
        bound: f64,
        seed: u64,
    ) -> Self {
        let trials = outcomes.len();
        let passes = outcomes.iter().filter(|o| o.0).count();
        let worst_violation = outcomes.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
        PropertyReport {
            property: property.into(),
            subject: subject.into(),
            trials,
            passes,
            threshold,
            worst_violation,
            bound,
            seed,
            verdict: trials > 0 && passes as f64 >= threshold * trials as f64,
        }
    }

    pub fn pass_rate(&self) -> f64 {
        self.passes as f64 / self.trials.max(1) as f64
    }
}

/// Something that can draw a sketch for a given input dimension. `subject` is
/// the matrix the sketch will be applied to; data-aware families (leverage
/// scores) read it, oblivious ones ignore it.
pub trait SketchSource: Sync {
    fn draw(&self, input_dim: usize, seed: u64, subject: &DenseMatrix) -> Result<SketchOperator, SketchError>;
    fn describe(&self) -> String;
}

/// A sketch family together with its output dimension(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum SketchSpec {
    Identity,
    Sparse { s: usize },
    Gaussian { s: usize },
    Leverage { s: usize },
    Composed { t: usize, s: usize },
}

impl SketchSpec {
    pub fn family(&self) -> SketchFamily {
        match self {
            SketchSpec::Identity => SketchFamily::Identity,
            SketchSpec::Sparse { .. } => SketchFamily::Sparse,
            SketchSpec::Gaussian { .. } => SketchFamily::Gaussian,
            SketchSpec::Leverage { .. } => SketchFamily::Leverage,
            SketchSpec::Composed { .. } => SketchFamily::Composed,
        }
    }
}

impl SketchSource for SketchSpec {
    fn draw(&self, input_dim: usize, seed: u64, subject: &DenseMatrix) -> Result<SketchOperator, SketchError> {
        Ok(match *self {
            SketchSpec::Identity => SketchOperator::Identity(input_dim),
            SketchSpec::Sparse { s } => SparseEmbedding::build(input_dim, s, seed)?.into(),
            SketchSpec::Gaussian { s } => GaussianSketch::build(input_dim, s, seed)?.into(),
            SketchSpec::Leverage { s } => {
                let scores = compute_leverage_scores(subject, DEFAULT_RANK_TOL)?;
                LeverageScoreSketch::build(scores, s, seed)?.into()
            }
            SketchSpec::Composed { t, s } => ComposedSketch::build(input_dim, t, s, seed)?.into(),
        })
    }

    fn describe(&self) -> String {
        match *self {
            SketchSpec::Identity => "identity".into(),
            SketchSpec::Sparse { s } => format!("sparse s={s}"),
            SketchSpec::Gaussian { s } => format!("gaussian s={s}"),
            SketchSpec::Leverage { s } => format!("leverage s={s}"),
            SketchSpec::Composed { t, s } => format!("composed t={t} s={s}"),
        }
    }
}

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = stream_rng(seed, STREAM_VERIFY);
    DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}

/// Uniformly random `rows × cols` matrix with orthonormal columns.
pub fn random_orthonormal(rows: usize, cols: usize, seed: u64) -> Result<DenseMatrix, SolveError> {
    let g = gaussian_matrix(rows, cols, seed);
    Ok(svd(&g, DEFAULT_RANK_TOL)?.u)
}

fn run_trials<F>(trials: usize, seed: u64, trial: F) -> Result<Vec<(bool, f64)>, SolveError>
where
    F: Fn(u64) -> Result<(bool, f64), SolveError> + Sync,
{
    (0..trials as u64).into_par_iter().map(|t| trial(derive_seed(seed, t))).collect()
}

/// Extreme squared singular values of `x`, counting missing ones as zero.
fn squared_singular_range(x: &DenseMatrix, expected_rank: usize) -> Result<(f64, f64), SolveError> {
    let f = svd(x, 0.0)?;
    let hi = f.sigma.first().copied().unwrap_or(0.0);
    let lo = if f.rank() < expected_rank { 0.0 } else { f.sigma.last().copied().unwrap_or(0.0) };
    Ok((lo * lo, hi * hi))
}

/// Subspace embedding: for random orthonormal `U` (m×d), every squared
/// singular value of `S·U` lies in `[1 − ε, 1 + ε]`.
pub fn check_embedding(
    source: &impl SketchSource,
    m: usize,
    d: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport, SolveError> {
    let outcomes = run_trials(trials, seed, |ts| {
        let u = random_orthonormal(m, d, derive_seed(ts, 0))?;
        let s = source.draw(m, derive_seed(ts, 1), &u)?;
        let su = s.apply_left(&Matrix::Dense(u))?;
        let (lo, hi) = squared_singular_range(&su, d)?;
        let distortion = (1.0 - lo).max(hi - 1.0);
        Ok((distortion <= epsilon, distortion))
    })?;
    Ok(PropertyReport::new(
        "subspace-embedding",
        format!("{} m={m} d={d} eps={epsilon}", source.describe()),
        &outcomes,
        EMBEDDING_THRESHOLD,
        epsilon,
        seed,
    ))
}

/// Composition of two embeddings: singular values of `G·Π·U` within
/// `[sqrt(1 − 2ε − ε²), sqrt(1 + 2ε + ε²)]`.
pub fn check_composed_embedding(
    m: usize,
    d: usize,
    epsilon: f64,
    t: usize,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport, SolveError> {
    let lower = (1.0 - 2.0 * epsilon - epsilon * epsilon).max(0.0);
    let upper = 1.0 + 2.0 * epsilon + epsilon * epsilon;
    let outcomes = run_trials(trials, seed, |ts| {
        let u = random_orthonormal(m, d, derive_seed(ts, 0))?;
        let sk = ComposedSketch::build(m, t, s, derive_seed(ts, 1))?;
        let su = sk.apply_left(&Matrix::Dense(u), &mut 0)?;
        let (lo, hi) = squared_singular_range(&su, d)?;
        let distortion = (1.0 - lo).max(hi - 1.0);
        Ok((lo >= lower && hi <= upper, distortion))
    })?;
    Ok(PropertyReport::new(
        "composed-embedding",
        format!("composed t={t} s={s} m={m} d={d} eps={epsilon}"),
        &outcomes,
        DEFAULT_THRESHOLD,
        2.0 * epsilon + epsilon * epsilon,
        seed,
    ))
}

/// Shapes for the product check: `A` is `rows × a_cols`, `B` is `rows × b_cols`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductShapes {
    pub rows: usize,
    pub a_cols: usize,
    pub b_cols: usize,
}

/// Product approximation `‖AᵀSᵀSB − AᵀB‖_F ≤ factor · ε · ‖A‖_F‖B‖_F` on
/// Gaussian `A`, `B`. For the leverage family `A` is given orthonormal columns
/// and the scores are those of `A`, the setting in which the bound is stated.
pub fn check_product(
    source: &impl SketchSource,
    shapes: ProductShapes,
    epsilon: f64,
    bound_factor: f64,
    trials: usize,
    seed: u64,
    orthonormal_a: bool,
) -> Result<PropertyReport, SolveError> {
    check_product_on(source, epsilon, bound_factor, trials, seed, |ts| {
        let a = if orthonormal_a {
            random_orthonormal(shapes.rows, shapes.a_cols, derive_seed(ts, 0))?
        } else {
            gaussian_matrix(shapes.rows, shapes.a_cols, derive_seed(ts, 0))
        };
        let b = gaussian_matrix(shapes.rows, shapes.b_cols, derive_seed(ts, 2));
        Ok((a, b))
    })
}

/// [`check_product`] over caller-drawn operand pairs.
pub fn check_product_on<F>(
    source: &impl SketchSource,
    epsilon: f64,
    bound_factor: f64,
    trials: usize,
    seed: u64,
    draw: F,
) -> Result<PropertyReport, SolveError>
where
    F: Fn(u64) -> Result<(DenseMatrix, DenseMatrix), SolveError> + Sync,
{
    let outcomes = run_trials(trials, seed, |ts| {
        let (a, b) = draw(ts)?;
        let s = source.draw(a.rows(), derive_seed(ts, 1), &a)?;
        let sa = s.apply_left(&Matrix::Dense(a.clone()))?;
        let sb = s.apply_left(&Matrix::Dense(b.clone()))?;
        let approx = sa.transpose().matmul(&sb)?;
        let exact = a.transpose().matmul(&b)?;
        let err = approx.sub(&exact)?.fro_norm();
        let scale = a.fro_norm() * b.fro_norm();
        let rel = if scale > 0.0 { err / scale } else { 0.0 };
        Ok((err <= bound_factor * epsilon * scale, rel))
    })?;
    Ok(PropertyReport::new(
        "product-approximation",
        format!("{} eps={epsilon} factor={bound_factor}", source.describe()),
        &outcomes,
        DEFAULT_THRESHOLD,
        bound_factor * epsilon,
        seed,
    ))
}

/// Frobenius-norm preservation `‖SA‖_F² = (1 ± ε)‖A‖_F²` on Gaussian `A`.
pub fn check_fro_norm(
    source: &impl SketchSource,
    rows: usize,
    cols: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport, SolveError> {
    check_fro_norm_on(source, epsilon, trials, seed, |ts| Ok(gaussian_matrix(rows, cols, ts)))
}

/// [`check_fro_norm`] over caller-drawn matrices. A zero matrix passes.
pub fn check_fro_norm_on<F>(
    source: &impl SketchSource,
    epsilon: f64,
    trials: usize,
    seed: u64,
    draw: F,
) -> Result<PropertyReport, SolveError>
where
    F: Fn(u64) -> Result<DenseMatrix, SolveError> + Sync,
{
    let outcomes = run_trials(trials, seed, |ts| {
        let a = draw(derive_seed(ts, 0))?;
        let s = source.draw(a.rows(), derive_seed(ts, 1), &a)?;
        let an = a.fro_norm().powi(2);
        let sn = s.apply_left(&Matrix::Dense(a))?.fro_norm().powi(2);
        let dev = if an > 0.0 { (sn / an - 1.0).abs() } else { 0.0 };
        Ok((dev <= epsilon, dev))
    })?;
    Ok(PropertyReport::new(
        "frobenius-preservation",
        format!("{} eps={epsilon}", source.describe()),
        &outcomes,
        DEFAULT_THRESHOLD,
        epsilon,
        seed,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioMethod {
    /// Identity sketches on both sides; a control that reproduces the exact solve.
    IdentitySketch,
    SparseGaussian,
    Leverage,
    SymmetricSparseGaussian,
    SymmetricLeverage,
}

impl std::fmt::Display for RatioMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RatioMethod::IdentitySketch => "identity-sketch",
            RatioMethod::SparseGaussian => "sparse-gaussian",
            RatioMethod::Leverage => "leverage",
            RatioMethod::SymmetricSparseGaussian => "symmetric-sparse-gaussian",
            RatioMethod::SymmetricLeverage => "symmetric-leverage",
        })
    }
}

/// Relative-error guarantee `‖A − M·X̂·N‖_F ≤ (1 + ε)‖A − M·X*·N‖_F` against the
/// exact solver, on fresh synthetic instances.
pub fn check_gma_ratio(
    instances: &SyntheticSpec,
    method: RatioMethod,
    plan: &SketchPlan,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport, SolveError> {
    let bound = 1.0 + plan.epsilon;
    let outcomes = run_trials(trials, seed, |ts| {
        let inst = generate(instances, derive_seed(ts, 0))?;
        let p = &inst.problem;
        let trial_plan = SketchPlan { seed: derive_seed(ts, 1), ..*plan };
        let sol = match method {
            RatioMethod::IdentitySketch => {
                let (m, n, _, _) = p.dims();
                solve_sketched(p, &SketchOperator::Identity(m), &SketchOperator::Identity(n))?
            }
            RatioMethod::SparseGaussian => solve_sps_gauss(p, &trial_plan)?,
            RatioMethod::Leverage => solve_lev_score(p, &trial_plan)?,
            RatioMethod::SymmetricSparseGaussian | RatioMethod::SymmetricLeverage => {
                let pipeline = if method == RatioMethod::SymmetricLeverage {
                    Pipeline::Leverage
                } else {
                    Pipeline::SparseGaussian
                };
                solve_symmetric(p.a().clone(), p.m().clone(), &trial_plan, pipeline)?
            }
        };
        let exact = solve_exact(p)?;
        let ratio = ratio_from_residuals(sol.residual, exact.residual, p.a().fro_norm());
        Ok((ratio <= bound, ratio))
    })?;
    Ok(PropertyReport::new(
        "gma-relative-error",
        format!(
            "{method} m={} n={} c={} r={} noise={} eps={}",
            instances.m, instances.n, instances.c, instances.r, instances.noise, plan.epsilon
        ),
        &outcomes,
        DEFAULT_THRESHOLD,
        bound,
        seed,
    ))
}
