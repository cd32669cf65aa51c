use super::{DenseMatrix, Matrix, MatrixError, Result};

/// Singular values at or below `rank_tol * σ₁` are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 60;

/// Condensed SVD `A = U · diag(σ) · Vt` keeping only the numerically nonzero
/// singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    /// m×ρ, orthonormal columns.
    pub u: DenseMatrix,
    /// ρ values, nonincreasing and strictly positive.
    pub sigma: Vec<f64>,
    /// ρ×n, orthonormal rows.
    pub vt: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (v, s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *v *= s;
            }
        }
        us.matmul(&self.vt).expect("factor shapes agree")
    }
}

/// Condensed SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Wide inputs are factored through their transpose. The numerical rank is the
/// number of singular values strictly above `rank_tol · σ₁`; an all-zero input
/// yields rank 0 with empty factors.
pub fn svd(a: &DenseMatrix, rank_tol: f64) -> Result<SvdFactors> {
    if a.rows() >= a.cols() {
        svd_tall(a, rank_tol)
    } else {
        let f = svd_tall(&a.transpose(), rank_tol)?;
        Ok(SvdFactors { u: f.vt.transpose(), sigma: f.sigma, vt: f.u.transpose() })
    }
}

fn svd_tall(a: &DenseMatrix, rank_tol: f64) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    // Column-major working copies.
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let tol = (m.max(1) as f64).sqrt() * f64::EPSILON;
    // Columns this small relative to A are numerical noise; rotating them
    // against each other never settles.
    let fro = a.fro_norm();
    let negligible = (f64::EPSILON * fro) * (f64::EPSILON * fro);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma.abs() <= tol * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(MatrixError::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, c)| (norm(c), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let sigma_max = order.first().map_or(0.0, |o| o.0);
    let rank = if sigma_max > 0.0 { order.iter().take_while(|o| o.0 > rank_tol * sigma_max).count() } else { 0 };

    let mut u_cols: Vec<Vec<f64>> = order[..rank].iter().map(|&(s, j)| w[j].iter().map(|x| x / s).collect()).collect();
    // Columns belonging to small singular values lose orthogonality in the
    // normalisation above; two Gram-Schmidt passes restore it.
    for _ in 0..2 {
        for k in 0..rank {
            for l in 0..k {
                let proj = dot(&u_cols[l], &u_cols[k]);
                let (head, tail) = u_cols.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[l]) {
                    *x -= proj * y;
                }
            }
            let nk = norm(&u_cols[k]);
            u_cols[k].iter_mut().for_each(|x| *x /= nk);
        }
    }

    let sigma: Vec<f64> = order[..rank].iter().map(|o| o.0).collect();
    let u = DenseMatrix::from_fn(m, rank, |i, k| u_cols[k][i]);
    let vt = DenseMatrix::from_fn(rank, n, |k, i| v[order[k].1][i]);
    Ok(SvdFactors { u, sigma, vt })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    super::dense::scaled_norm(x.iter().copied())
}

/// Moore-Penrose pseudoinverse `V · Σ⁻¹ · Uᵀ` from the condensed SVD.
pub fn pinv(a: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let f = svd(a, rank_tol)?;
    Ok(pinv_from_factors(&f, a.rows(), a.cols()))
}

/// Pseudoinverse of an `rows × cols` matrix whose SVD is `f`.
pub fn pinv_from_factors(f: &SvdFactors, rows: usize, cols: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(cols, rows);
    for k in 0..f.rank() {
        let inv = 1.0 / f.sigma[k];
        let vk = f.vt.row(k);
        for (i, &vik) in vk.iter().enumerate() {
            let coef = vik * inv;
            if coef == 0.0 {
                continue;
            }
            let out_row = out.row_mut(i);
            for (j, o) in out_row.iter_mut().enumerate() {
                *o += coef * f.u[(j, k)];
            }
        }
    }
    out
}

/// Largest singular value; zero for an all-zero matrix.
pub fn spec_norm(a: &DenseMatrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(svd(a, 0.0)?.sigma.first().copied().unwrap_or(0.0))
}

/// `‖A − M·X·N‖_F`, forming `(M·X)·N` first.
pub fn residual_norm(a: &Matrix, m: &DenseMatrix, x: &DenseMatrix, n: &DenseMatrix) -> Result<f64> {
    let mx = m.matmul(x)?;
    let approx = mx.matmul(n)?;
    if approx.shape() != a.shape() {
        return Err(MatrixError::ShapeMismatch { op: "residual_norm", left: a.shape(), right: approx.shape() });
    }
    let diff = match a {
        Matrix::Dense(d) => d.sub(&approx)?,
        Matrix::Sparse(s) => {
            let mut neg = approx.scale(-1.0);
            for (i, j, v) in s.iter() {
                neg[(i, j)] += v;
            }
            neg
        }
    };
    Ok(diff.fro_norm())
}
