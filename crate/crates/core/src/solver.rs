//! Exact and sketched solvers for `min_X ‖A − M·X·N‖_F`.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{pinv_from_factors, residual_norm, svd, DenseMatrix, Matrix, MatrixError, DEFAULT_RANK_TOL};
use crate::rng::derive_seed;
use crate::sketch::{
    compute_leverage_scores, plan_dims, ComposedSketch, LeverageScoreSketch, Pipeline, SketchDims, SketchError,
    SketchFamily, SketchOperator, SketchPlan,
};

/// Exact residuals at or below this fraction of `‖A‖_F` are treated as zero.
pub const EXACT_RESIDUAL_FLOOR: f64 = 1e-12;
/// A sketched residual at or below this fraction of `‖A‖_F` matches a zero exact residual.
pub const SKETCHED_RESIDUAL_FLOOR: f64 = 1e-10;

/// Largest `|a_ij − a_ji|` accepted by the symmetric solver.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("A is not symmetric: max |a_ij - a_ji| = {max_dev:e}")]
    Asymmetric { max_dev: f64 },
    #[error("{0} is zero: no column space to sample")]
    ZeroFactor(&'static str),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Sketch(#[from] SketchError),
}

pub type Result<T> = std::result::Result<T, SolveError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    SparseGaussian,
    Leverage,
    /// Caller-supplied sketches outside the two pipelines.
    Sketched,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::SparseGaussian => "sparse-gaussian",
            Method::Leverage => "leverage",
            Method::Sketched => "sketched",
        })
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub build: f64,
    pub apply: f64,
    pub pinv: f64,
    pub multiply: f64,
}

impl StageTimes {
    pub fn total(&self) -> f64 {
        self.build + self.apply + self.pinv + self.multiply
    }
}

/// `A` (m×n), `M` (m×c) and `N` (r×n) with `c ≤ m`, `r ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GmaProblem {
    a: Matrix,
    m: DenseMatrix,
    n: DenseMatrix,
}

impl GmaProblem {
    pub fn new(a: impl Into<Matrix>, m: DenseMatrix, n: DenseMatrix) -> Result<Self> {
        let a = a.into();
        let (rows, cols) = a.shape();
        if rows == 0 || cols == 0 || m.cols() == 0 || n.rows() == 0 {
            return Err(SolveError::InvalidProblem("all dimensions must be at least 1".into()));
        }
        if m.rows() != rows {
            return Err(SolveError::InvalidProblem(format!("M is {}x{} but A has {rows} rows", m.rows(), m.cols())));
        }
        if n.cols() != cols {
            return Err(SolveError::InvalidProblem(format!("N is {}x{} but A has {cols} columns", n.rows(), n.cols())));
        }
        if m.cols() > rows || n.rows() > cols {
            return Err(SolveError::InvalidProblem(format!(
                "require c <= m and r <= n, got c={} m={rows} r={} n={cols}",
                m.cols(),
                n.rows()
            )));
        }
        Ok(GmaProblem { a, m, n })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn n(&self) -> &DenseMatrix {
        &self.n
    }

    /// `(m, n, c, r)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.a.rows(), self.a.cols(), self.m.cols(), self.n.rows())
    }

    pub fn residual(&self, x: &DenseMatrix) -> Result<f64> {
        Ok(residual_norm(&self.a, &self.m, x, &self.n)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmaSolution {
    pub x: DenseMatrix,
    pub residual: f64,
    pub method: Method,
    pub symmetric: bool,
    pub dims_used: Option<SketchDims>,
    pub wall_times: StageTimes,
    pub seed: Option<u64>,
    /// Entries of `A` read while forming the (sketched) core matrix.
    pub entries_touched: u64,
    pub warnings: Vec<String>,
}

/// Cheaper association of `L · C · R`, by multiply-add count.
fn triple_product(l: &DenseMatrix, c: &DenseMatrix, r: &DenseMatrix) -> Result<DenseMatrix> {
    let left_first = l.rows() * l.cols() * c.cols() + l.rows() * c.cols() * r.cols();
    let right_first = c.rows() * c.cols() * r.cols() + l.rows() * l.cols() * r.cols();
    Ok(if left_first <= right_first { l.matmul(c)?.matmul(r)? } else { l.matmul(&c.matmul(r)?)? })
}

/// `X* = M† · A · N†`. The association order is picked from the operand sizes,
/// counting stored entries of `A` for the products that involve it.
pub fn solve_exact(p: &GmaProblem) -> Result<GmaSolution> {
    let (m, n, c, r) = p.dims();
    let mut times = StageTimes::default();

    let t0 = Instant::now();
    let m_pinv = pinv_from_factors(&svd(&p.m, DEFAULT_RANK_TOL)?, m, c);
    let n_pinv = pinv_from_factors(&svd(&p.n, DEFAULT_RANK_TOL)?, r, n);
    times.pinv = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let nnz = p.a.stored_entries();
    let left_first = c * nnz + c * n * r;
    let right_first = nnz * r + m * c * r;
    let x = if left_first <= right_first {
        p.a.left_mul(&m_pinv)?.matmul(&n_pinv)?
    } else {
        m_pinv.matmul(&p.a.right_mul(&n_pinv)?)?
    };
    times.multiply = t1.elapsed().as_secs_f64();

    let residual = p.residual(&x)?;
    Ok(GmaSolution {
        x,
        residual,
        method: Method::Exact,
        symmetric: false,
        dims_used: None,
        wall_times: times,
        seed: None,
        entries_touched: nnz as u64,
        warnings: Vec::new(),
    })
}

/// `X̂ = (S_M·M)† · (S_M·A·S_Nᵀ) · (N·S_Nᵀ)†`.
///
/// A rank-deficient sketched factor is recorded in `warnings` and the solve
/// continues through the pseudoinverse; the relative-error guarantee assumes
/// full column rank of `S_M·M` and full row rank of `N·S_Nᵀ`.
pub fn solve_sketched(p: &GmaProblem, s_m: &SketchOperator, s_n: &SketchOperator) -> Result<GmaSolution> {
    let (m, n, c, r) = p.dims();
    if s_m.input_dim() != m {
        return Err(SketchError::DimensionMismatch { op: "left sketch", expected: s_m.input_dim(), found: m }.into());
    }
    if s_n.input_dim() != n {
        return Err(SketchError::DimensionMismatch { op: "right sketch", expected: s_n.input_dim(), found: n }.into());
    }
    let mut times = StageTimes::default();
    let mut warnings = Vec::new();
    let mut touched = 0u64;

    let t0 = Instant::now();
    let sm_m = s_m.apply_left(&Matrix::Dense(p.m.clone()))?;
    let n_sn = s_n.apply_right(&Matrix::Dense(p.n.clone()))?;
    let core = match (s_m, s_n) {
        (SketchOperator::Leverage(left), SketchOperator::Leverage(right)) => {
            LeverageScoreSketch::sample_both_sides(left, &p.a, right, &mut touched)?
        }
        (_, SketchOperator::Leverage(_)) => {
            let a_sn = s_n.apply_right_counted(&p.a, &mut touched)?;
            s_m.apply_left(&Matrix::Dense(a_sn))?
        }
        _ => {
            let sm_a = s_m.apply_left_counted(&p.a, &mut touched)?;
            s_n.apply_right(&Matrix::Dense(sm_a))?
        }
    };
    times.apply = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let left_svd = svd(&sm_m, DEFAULT_RANK_TOL)?;
    if left_svd.rank() < c {
        warnings.push(format!(
            "S_M*M ({}x{c}) has numerical rank {} < {c}; relative-error bound not guaranteed",
            sm_m.rows(),
            left_svd.rank()
        ));
    }
    let right_svd = svd(&n_sn, DEFAULT_RANK_TOL)?;
    if right_svd.rank() < r {
        warnings.push(format!(
            "N*S_N^T ({r}x{}) has numerical rank {} < {r}; relative-error bound not guaranteed",
            n_sn.cols(),
            right_svd.rank()
        ));
    }
    let left_pinv = pinv_from_factors(&left_svd, sm_m.rows(), c);
    let right_pinv = pinv_from_factors(&right_svd, r, n_sn.cols());
    times.pinv = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let x = triple_product(&left_pinv, &core, &right_pinv)?;
    times.multiply = t2.elapsed().as_secs_f64();

    let method = match (s_m.family(), s_n.family()) {
        (SketchFamily::Composed, SketchFamily::Composed) => Method::SparseGaussian,
        (SketchFamily::Leverage, SketchFamily::Leverage) => Method::Leverage,
        _ => Method::Sketched,
    };
    let residual = p.residual(&x)?;
    Ok(GmaSolution {
        x,
        residual,
        method,
        symmetric: false,
        dims_used: Some(SketchDims { s_c: s_m.sketch_dim(), s_r: s_n.sketch_dim(), t: None, t_prime: None }),
        wall_times: times,
        seed: None,
        entries_touched: touched,
        warnings,
    })
}

/// Sparse embedding followed by a Gaussian projection on each side, sized by
/// [`plan_dims`]. The left and right sketches use independent derived seeds.
pub fn solve_sps_gauss(p: &GmaProblem, plan: &SketchPlan) -> Result<GmaSolution> {
    plan.validate()?;
    let (m, n, c, r) = p.dims();
    let dims = plan_dims(plan, c, r, Pipeline::SparseGaussian);
    let t0 = Instant::now();
    let (t, t_prime) = (dims.t.expect("composed dims"), dims.t_prime.expect("composed dims"));
    let s_m = ComposedSketch::build(m, t, dims.s_c, derive_seed(plan.seed, 0))?;
    let s_n = ComposedSketch::build(n, t_prime, dims.s_r, derive_seed(plan.seed, 1))?;
    let build = t0.elapsed().as_secs_f64();

    let mut sol = solve_sketched(p, &s_m.into(), &s_n.into())?;
    sol.method = Method::SparseGaussian;
    sol.dims_used = Some(dims);
    sol.wall_times.build = build;
    sol.seed = Some(plan.seed);
    Ok(sol)
}

/// Leverage-score sampling of the rows of `M` and the columns of `N`. The core
/// matrix reads exactly `s_c · s_r` entries of `A`.
pub fn solve_lev_score(p: &GmaProblem, plan: &SketchPlan) -> Result<GmaSolution> {
    plan.validate()?;
    let (_, _, c, r) = p.dims();
    let dims = plan_dims(plan, c, r, Pipeline::Leverage);
    let t0 = Instant::now();
    let scores_m = compute_leverage_scores(&p.m, DEFAULT_RANK_TOL).map_err(|e| zero_factor(e, "M"))?;
    let scores_n = compute_leverage_scores(&p.n.transpose(), DEFAULT_RANK_TOL).map_err(|e| zero_factor(e, "N"))?;
    let s_m = LeverageScoreSketch::build(scores_m, dims.s_c, derive_seed(plan.seed, 0))?;
    let s_n = LeverageScoreSketch::build(scores_n, dims.s_r, derive_seed(plan.seed, 1))?;
    let build = t0.elapsed().as_secs_f64();

    let mut sol = solve_sketched(p, &s_m.into(), &s_n.into())?;
    sol.method = Method::Leverage;
    sol.dims_used = Some(dims);
    sol.wall_times.build = build;
    sol.seed = Some(plan.seed);
    Ok(sol)
}

fn zero_factor(e: SketchError, which: &'static str) -> SolveError {
    match e {
        SketchError::NoColumnSpace => SolveError::ZeroFactor(which),
        other => other.into(),
    }
}

/// Symmetric problem `min_X ‖A − M·X·Mᵀ‖_F`: runs `pipeline` with independent
/// sketches for both sides and returns `(X̂ + X̂ᵀ)/2`.
pub fn solve_symmetric(
    a: impl Into<Matrix>,
    m: DenseMatrix,
    plan: &SketchPlan,
    pipeline: Pipeline,
) -> Result<GmaSolution> {
    let a = a.into();
    if !a.is_symmetric(SYMMETRY_TOL) {
        let max_dev = if a.rows() == a.cols() {
            let d = a.to_dense();
            d.sub(&d.transpose())?.max_abs()
        } else {
            f64::INFINITY
        };
        return Err(SolveError::Asymmetric { max_dev });
    }
    let n = m.transpose();
    let p = GmaProblem::new(a, m, n)?;
    let mut sol = match pipeline {
        Pipeline::SparseGaussian => solve_sps_gauss(&p, plan)?,
        Pipeline::Leverage => solve_lev_score(&p, plan)?,
    };
    let t0 = Instant::now();
    let xh = &sol.x;
    sol.x = DenseMatrix::from_fn(xh.rows(), xh.cols(), |i, j| 0.5 * (xh[(i, j)] + xh[(j, i)]));
    sol.wall_times.multiply += t0.elapsed().as_secs_f64();
    sol.residual = p.residual(&sol.x)?;
    sol.symmetric = true;
    Ok(sol)
}

/// Ratio of two residuals with the floor rule: when the exact residual is at
/// most `1e-12·‖A‖_F`, the ratio is 1 if the sketched residual is at most
/// `1e-10·‖A‖_F` and `+∞` otherwise.
pub fn ratio_from_residuals(sketched: f64, exact: f64, a_norm: f64) -> f64 {
    if exact <= EXACT_RESIDUAL_FLOOR * a_norm {
        if sketched <= SKETCHED_RESIDUAL_FLOOR * a_norm {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        sketched / exact
    }
}

/// `sol.residual / ‖A − M·X*·N‖_F`, solving the exact problem for the denominator.
pub fn error_ratio(p: &GmaProblem, sol: &GmaSolution) -> Result<f64> {
    let exact = solve_exact(p)?;
    Ok(ratio_from_residuals(sol.residual, exact.residual, p.a.fro_norm()))
}
