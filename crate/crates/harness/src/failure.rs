use std::fmt;

use gma_core::matrix::MatrixError;
use gma_core::mmio::MmError;
use gma_core::sketch::SketchError;
use gma_core::solver::SolveError;

/// Why a command stopped, and the process exit code that goes with it.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, inconsistent shapes, bad configuration.
    Input(anyhow::Error),
    /// A solve that could not complete (for example an SVD that did not converge).
    Numerical(anyhow::Error),
    /// `verify` ran to completion but at least one property failed.
    Verdict(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verdict(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Numerical(e) => write!(f, "{e:#}"),
            Failure::Verdict(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for Failure {}

impl From<MmError> for Failure {
    fn from(e: MmError) -> Self {
        Failure::Input(e.into())
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::SvdNoConvergence { .. } => Failure::Numerical(e.into()),
            _ => Failure::Input(e.into()),
        }
    }
}

impl From<SketchError> for Failure {
    fn from(e: SketchError) -> Self {
        match e {
            SketchError::Matrix(m) => m.into(),
            _ => Failure::Input(e.into()),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Matrix(m) => m.into(),
            SolveError::Sketch(s) => s.into(),
            other => Failure::Input(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}
