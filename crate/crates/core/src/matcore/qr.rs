//! Householder QR.

use super::matrix::{Matrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Thin factorization `A = Q·R` of a tall matrix (`rows ≥ cols`):
/// `Q` is `m×n` with orthonormal columns and `R` is `n×n` upper triangular.
#[derive(Debug, Clone)]
pub struct Qr {
    pub q: Matrix,
    pub r: Matrix,
}

impl Qr {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let (m, n) = a.shape();
        if m < n {
            return Err(Error::Shape(format!("thin QR needs rows >= cols, got {m}x{n}")));
        }
        let mut work = a.clone();
        let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(n);

        for k in 0..n {
            let norm_x = (k..m).map(|i| work[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            let mut v: Vec<C64> = (k..m).map(|i| work[(i, k)]).collect();
            if norm_x == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let x0 = v[0];
            let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
            let alpha = -phase * norm_x;
            v[0] -= alpha;
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            // work[k.., k..] -= 2 v (vᴴ work[k.., k..])
            for j in k..n {
                let s: C64 = (k..m).map(|i| v[i - k].conj() * work[(i, j)]).sum();
                let s2 = s * 2.0;
                for i in k..m {
                    let vi = v[i - k];
                    work[(i, j)] -= vi * s2;
                }
            }
            reflectors.push(v);
        }

        let r = Matrix::from_fn(n, n, |i, j| if i <= j { work[(i, j)] } else { ZERO });
        let mut q = Matrix::from_fn(m, n, |i, j| if i == j { ONE } else { ZERO });
        for (k, v) in reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            for j in 0..n {
                let s: C64 = (k..m).map(|i| v[i - k].conj() * q[(i, j)]).sum();
                let s2 = s * 2.0;
                for i in k..m {
                    let vi = v[i - k];
                    q[(i, j)] -= vi * s2;
                }
            }
        }
        Ok(Self { q, r })
    }
}
