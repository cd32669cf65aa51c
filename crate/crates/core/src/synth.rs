//! Planted synthetic instances `A = M·X₀·N + noise`.
//!
//! `M`, `X₀` and `N` have i.i.d. standard normal entries. The noise is a
//! Gaussian matrix rescaled to `η · ‖M·X₀·N‖_F` in Frobenius norm, so `η = 0`
//! gives a consistent system.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::rng::{stream_rng, STREAM_SYNTHETIC};
use crate::solver::{GmaProblem, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub c: usize,
    pub r: usize,
    /// Noise level η relative to `‖M·X₀·N‖_F`.
    pub noise: f64,
    /// `A` symmetric with `N = Mᵀ` and symmetric `X₀`; requires `m = n`, `c = r`.
    pub symmetric: bool,
    /// Keep each entry of `A` with this probability and store `A` sparse.
    pub density: Option<f64>,
}

impl SyntheticSpec {
    pub fn dense(m: usize, n: usize, c: usize, r: usize, noise: f64) -> Self {
        SyntheticSpec { m, n, c, r, noise, symmetric: false, density: None }
    }

    pub fn symmetric(m: usize, c: usize, noise: f64) -> Self {
        SyntheticSpec { symmetric: true, ..Self::dense(m, m, c, c, noise) }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidProblem(msg));
        if self.m == 0 || self.n == 0 || self.c == 0 || self.r == 0 {
            return bad("m, n, c, r must all be at least 1".into());
        }
        if self.c > self.m || self.r > self.n {
            return bad(format!("need c <= m and r <= n, got {self:?}"));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return bad(format!("noise level {} must be finite and nonnegative", self.noise));
        }
        if self.symmetric && (self.m != self.n || self.c != self.r) {
            return bad("symmetric instances need m = n and c = r".into());
        }
        if let Some(d) = self.density {
            if !(d > 0.0 && d <= 1.0) {
                return bad(format!("density {d} not in (0, 1]"));
            }
            if self.symmetric {
                return bad("sparse symmetric instances are not supported".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub problem: GmaProblem,
    pub x0: DenseMatrix,
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut *rng))
}

/// Draws an instance from the `(seed, synthetic)` stream.
pub fn generate(spec: &SyntheticSpec, seed: u64) -> Result<SyntheticInstance, SolveError> {
    spec.validate()?;
    let mut rng = stream_rng(seed, STREAM_SYNTHETIC);
    let m = gaussian(spec.m, spec.c, &mut rng);
    let mut x0 = gaussian(spec.c, spec.r, &mut rng);
    let n = if spec.symmetric {
        x0 = DenseMatrix::from_fn(spec.c, spec.c, |i, j| 0.5 * (x0[(i, j)] + x0[(j, i)]));
        m.transpose()
    } else {
        gaussian(spec.r, spec.n, &mut rng)
    };
    let mx = m.matmul(&x0)?;

    let problem = match spec.density {
        None => {
            let b = mx.matmul(&n)?;
            let mut e = gaussian(spec.m, spec.n, &mut rng);
            if spec.symmetric {
                e = e.add(&e.transpose())?;
            }
            let mut a = add_scaled_noise(&b, &e, spec.noise)?;
            if spec.symmetric {
                a = DenseMatrix::from_fn(spec.m, spec.m, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
            }
            GmaProblem::new(a, m, n)?
        }
        Some(density) => {
            let mut planted = Vec::new();
            let mut noise = Vec::new();
            let nt = n.transpose();
            for i in 0..spec.m {
                for j in 0..spec.n {
                    if rng.gen::<f64>() < density {
                        let b: f64 = mx.row(i).iter().zip(nt.row(j)).map(|(x, y)| x * y).sum();
                        let z: f64 = StandardNormal.sample(&mut rng);
                        planted.push((i, j, b));
                        noise.push(z);
                    }
                }
            }
            let b_norm = planted.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            let e_norm = noise.iter().map(|z| z * z).sum::<f64>().sqrt();
            let scale = if e_norm > 0.0 { spec.noise * b_norm / e_norm } else { 0.0 };
            let a = SparseMatrix::from_triplets(
                spec.m,
                spec.n,
                planted.into_iter().zip(noise).map(|((i, j, b), z)| (i, j, b + scale * z)),
            )?;
            GmaProblem::new(a, m, n)?
        }
    };
    Ok(SyntheticInstance { problem, x0 })
}

fn add_scaled_noise(b: &DenseMatrix, e: &DenseMatrix, eta: f64) -> Result<DenseMatrix, SolveError> {
    let e_norm = e.fro_norm();
    if eta == 0.0 || e_norm == 0.0 {
        return Ok(b.clone());
    }
    Ok(b.add(&e.scale(eta * b.fro_norm() / e_norm))?)
}
