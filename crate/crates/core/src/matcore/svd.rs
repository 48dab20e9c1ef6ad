//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of a working copy of `A` are rotated pairwise until they are
//! mutually orthogonal; the same rotations accumulated on the identity give
//! `V`. The column norms are the singular values. Accuracy is relative to
//! each column, so small singular values are resolved well.

use super::matrix::{Matrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Economy SVD `A = U·diag(sigma)·Vᴴ` with `min(m, n)` singular values in
/// descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let us = self.u.scale_cols(&self.sigma);
        &us * &self.v.adjoint()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Default cutoff `max(m, n)·eps·σ_max`.
    pub fn default_tol(&self) -> f64 {
        let (m, n) = (self.u.rows(), self.v.rows());
        m.max(n) as f64 * f64::EPSILON * self.sigma_max()
    }

    /// Number of singular values strictly above `tol` (default cutoff when `None`).
    pub fn rank(&self, tol: Option<f64>) -> usize {
        let tol = tol.unwrap_or_else(|| self.default_tol());
        self.sigma.iter().filter(|&&s| s > tol).count()
    }
}

pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.is_empty() {
        return Err(Error::Shape("SVD of an empty matrix".into()));
    }
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let Svd { u, sigma, v } = jacobi_tall(&a.adjoint())?;
        Ok(Svd { u: v, sigma, v: u })
    }
}

fn col_dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn col_norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Applies the rotation to the column pair (p, q) in place.
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (xp, xq) = (&mut lo[p], &mut hi[0]);
    let s_conj = phase.conj() * s;
    let s_ph = phase * s;
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let ap = *a;
        let aq = *b;
        *a = ap * c - aq * s_conj;
        *b = ap * s_ph + aq * c;
    }
}

fn jacobi_tall(a: &Matrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.col(j).into_inner()).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()).collect();

    // columns this small are rounding noise; rotating them against each
    // other can cycle forever without changing anything that matters
    let negligible = (f64::EPSILON * a.frobenius_norm()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = col_norm_sqr(&w[p]);
                let beta = col_norm_sqr(&w[q]);
                let gamma = col_dot(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = gamma / g;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::DecompositionFailure(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps for a {m}x{n} matrix"
        )));
    }

    let mut order: Vec<(usize, f64)> = w.iter().map(|c| col_norm_sqr(c).sqrt()).enumerate().collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let sigma: Vec<f64> = order.iter().map(|&(_, s)| s).collect();
    let smax = sigma[0];
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut missing = Vec::new();
    for (k, &(j, s)) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
        if s * s > negligible && s > 1e-150 * smax {
            for i in 0..m {
                u[(i, k)] = w[j][i] / s;
            }
        } else {
            missing.push(k);
        }
    }
    complete_orthonormal(&mut u, &missing);
    Ok(Svd { u, sigma, v: vm })
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all other
/// columns (two passes of modified Gram-Schmidt over the standard basis).
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    let (m, n) = u.shape();
    let mut filled: Vec<bool> = vec![true; n];
    for &k in missing {
        filled[k] = false;
    }
    let mut basis = 0;
    for &k in missing {
        loop {
            assert!(basis < m, "cannot complete orthonormal basis");
            let mut cand: Vec<C64> = (0..m).map(|i| if i == basis { ONE } else { ZERO }).collect();
            basis += 1;
            for _ in 0..2 {
                for j in (0..n).filter(|&j| filled[j]) {
                    let col: Vec<C64> = (0..m).map(|i| u[(i, j)]).collect();
                    let proj = col_dot(&col, &cand);
                    for (c, x) in cand.iter_mut().zip(&col) {
                        *c -= x * proj;
                    }
                }
            }
            let nrm = col_norm_sqr(&cand).sqrt();
            if nrm > 1e-8 {
                for i in 0..m {
                    u[(i, k)] = cand[i] / nrm;
                }
                filled[k] = true;
                break;
            }
        }
    }
}

/// Rank with the default cutoff `max(m, n)·eps·σ_max`, or an explicit one.
pub fn rank(a: &Matrix, tol: Option<f64>) -> Result<usize> {
    if a.is_empty() {
        return Err(Error::Shape("rank of an empty matrix".into()));
    }
    Ok(svd(a)?.rank(tol))
}
