//! Generalized matrix approximation `min_X ‖A − M·X·N‖_F`, solved exactly through
//! pseudoinverses and approximately through randomized sketches.
//!
//! The sketched solvers reduce `A` to `S_M · A · S_Nᵀ` and solve the small problem
//! `(S_M M)† (S_M A S_Nᵀ) (N S_Nᵀ)†`. Two pipelines are provided: a sparse embedding
//! followed by a Gaussian projection, and leverage-score row/column sampling, which
//! reads only `s_c · s_r` entries of `A`.

pub mod matrix;
pub mod mmio;
pub mod rng;
pub mod sketch;
pub mod solver;
pub mod synth;
pub mod verify;

pub use matrix::{DenseMatrix, Matrix, MatrixError, SparseMatrix, SvdFactors};
pub use sketch::{SketchDims, SketchFamily, SketchOperator, SketchPlan};
pub use solver::{GmaProblem, GmaSolution, Method};
