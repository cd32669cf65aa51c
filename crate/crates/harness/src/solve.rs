use std::path::{Path, PathBuf};

use anyhow::Context;
use gma_core::matrix::DenseMatrix;
use gma_core::mmio::{read_dense, read_matrix, write_matrix};
use gma_core::sketch::{Pipeline, SketchDims, SketchPlan};
use gma_core::solver::{solve_exact, solve_lev_score, solve_sps_gauss, solve_symmetric, StageTimes};
use gma_core::{GmaProblem, Matrix};
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolveMethod {
    Exact,
    SparseGaussian,
    Leverage,
    /// `A ≈ M·X·Mᵀ` with symmetric `X`; `--n` may be omitted.
    Symmetric,
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub a: PathBuf,
    pub m: PathBuf,
    pub n: Option<PathBuf>,
    pub method: SolveMethod,
    /// Sketching pipeline used by the symmetric method.
    pub pipeline: Pipeline,
    pub plan: SketchPlan,
    pub out: PathBuf,
}

/// Metadata written next to the solution matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub method: String,
    pub out: PathBuf,
    pub shape: (usize, usize, usize, usize),
    pub x_shape: (usize, usize),
    pub residual: f64,
    pub a_fro_norm: f64,
    pub relative_residual: f64,
    pub symmetric: bool,
    pub dims_used: Option<SketchDims>,
    pub wall_times: StageTimes,
    pub seed: Option<u64>,
    pub entries_touched: u64,
    pub warnings: Vec<String>,
}

fn read_factor(path: &Path, name: &str) -> Result<DenseMatrix, Failure> {
    read_dense(path).with_context(|| format!("reading {name}")).map_err(Failure::Input)
}

pub fn run_solve(args: &SolveArgs) -> Result<SolveRecord, Failure> {
    let a = read_matrix(&args.a).context("reading A").map_err(Failure::Input)?;
    let m = read_factor(&args.m, "M")?;
    let n = match &args.n {
        Some(path) => Some(read_factor(path, "N")?),
        None => None,
    };
    args.plan.validate()?;

    let (sol, problem) = match args.method {
        SolveMethod::Symmetric => {
            let mt = m.transpose();
            if let Some(n) = &n {
                if n.shape() != mt.shape() || n.sub(&mt)?.max_abs() > 0.0 {
                    return Err(Failure::input("symmetric method needs N = Mᵀ (or omit --n)"));
                }
            }
            let sol = solve_symmetric(a.clone(), m.clone(), &args.plan, args.pipeline)?;
            (sol, GmaProblem::new(a, m, mt)?)
        }
        method => {
            let n = n.ok_or_else(|| Failure::input(format!("--n is required for method {method:?}")))?;
            let p = GmaProblem::new(a, m, n)?;
            let sol = match method {
                SolveMethod::Exact => solve_exact(&p)?,
                SolveMethod::SparseGaussian => solve_sps_gauss(&p, &args.plan)?,
                _ => solve_lev_score(&p, &args.plan)?,
            };
            (sol, p)
        }
    };

    write_matrix(&args.out, &Matrix::Dense(sol.x.clone()))?;
    let a_fro_norm = problem.a().fro_norm();
    let method = match args.method {
        SolveMethod::Symmetric => format!("symmetric-{}", sol.method),
        _ => sol.method.to_string(),
    };
    Ok(SolveRecord {
        method,
        out: args.out.clone(),
        shape: problem.dims(),
        x_shape: sol.x.shape(),
        residual: sol.residual,
        a_fro_norm,
        relative_residual: if a_fro_norm > 0.0 { sol.residual / a_fro_norm } else { 0.0 },
        symmetric: sol.symmetric,
        dims_used: sol.dims_used,
        wall_times: sol.wall_times,
        seed: sol.seed,
        entries_touched: sol.entries_touched,
        warnings: sol.warnings,
    })
}
