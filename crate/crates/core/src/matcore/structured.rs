//! Norms and structured matrices: DFT, convolution, circulant.

use std::f64::consts::PI;

use super::lu;
use super::matrix::{Matrix, Vector, C64, ZERO};
use crate::error::{Error, Result};

/// General `l_p` norm. `p = f64::INFINITY` gives the max magnitude and
/// `p = 0` counts the nonzero entries (the sparsity pseudonorm).
pub fn lp_norm(x: &Vector, p: f64) -> Result<f64> {
    if p.is_nan() || p < 0.0 {
        return Err(Error::Domain(format!("l_p norm needs p >= 0, got {p}")));
    }
    let mags = x.abs();
    let max = mags.iter().copied().fold(0.0, f64::max);
    if p == 0.0 {
        return Ok(l0_count(x, 0.0) as f64);
    }
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    // scale by the max entry so large p neither overflows nor underflows
    let s: f64 = mags.iter().map(|m| (m / max).powf(p)).sum();
    Ok(max * s.powf(1.0 / p))
}

/// Number of entries with magnitude strictly above `tol`.
pub fn l0_count(x: &Vector, tol: f64) -> usize {
    x.iter().filter(|z| z.norm() > tol).count()
}

/// Unnormalized DFT matrix `W[n, k] = w^{nk}` with `w = e^{-j2π/N}`.
pub fn build_dft_matrix(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::Shape("DFT size must be at least 1".into()));
    }
    Ok(Matrix::from_fn(n, n, |r, c| twiddle(n, (r * c) % n, -1.0)))
}

/// `e^{sign·j2πk/n}` with exact values on the axes.
pub(crate) fn twiddle(n: usize, k: usize, sign: f64) -> C64 {
    let k = k % n;
    if 4 * k == n {
        return C64::new(0.0, sign);
    }
    if 2 * k == n {
        return C64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * n {
        return C64::new(0.0, -sign);
    }
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    let theta = sign * 2.0 * PI * k as f64 / n as f64;
    C64::new(theta.cos(), theta.sin())
}

/// Banded lower-triangular Toeplitz matrix of size `(len(h)+n_cols-1)×n_cols`
/// whose product with `x` is the full linear convolution `h*x`.
pub fn build_convolution_matrix(h: &Vector, n_cols: usize) -> Result<Matrix> {
    if h.is_empty() || n_cols == 0 {
        return Err(Error::Shape("convolution needs a nonempty kernel and at least one column".into()));
    }
    let rows = h.len() + n_cols - 1;
    Ok(Matrix::from_fn(rows, n_cols, |i, j| if i >= j && i - j < h.len() { h[i - j] } else { ZERO }))
}

/// Circulant matrix with `h` as its first column; each further column is a
/// cyclic downward shift of the previous one.
pub fn build_circulant(h: &Vector) -> Result<Matrix> {
    if h.is_empty() {
        return Err(Error::Shape("circulant of an empty vector".into()));
    }
    let n = h.len();
    Ok(Matrix::from_fn(n, n, |i, j| h[(i + n - j) % n]))
}

/// Outcome of diagonalizing a circulant by the DFT basis.
#[derive(Debug, Clone)]
pub struct CirculantEigen {
    /// Eigenvalues, equal to the DFT of `h`.
    pub lambda: Vector,
    /// `‖V⁻¹·C·V − diag(lambda)‖_F`.
    pub residual: f64,
    /// `‖C‖_F`, for relative comparisons.
    pub scale: f64,
}

/// Checks that the DFT basis diagonalizes the circulant built from `h`.
///
/// `V` holds the basis vectors `e^{+j2πnk/N}` as columns (the conjugate of
/// the DFT matrix); `V⁻¹` is obtained by a generic LU inverse rather than
/// the closed form `W/N`.
pub fn circulant_eigen_check(h: &Vector) -> Result<CirculantEigen> {
    let n = h.len();
    let c = build_circulant(h)?;
    let w = build_dft_matrix(n)?;
    let lambda = &w * h;
    let v = w.conj();
    let v_inv = lu::inverse(&v)?;
    let d = &(&v_inv * &c) * &v;
    let residual = (&d - &Matrix::from_diag(lambda.as_slice())).frobenius_norm();
    Ok(CirculantEigen { lambda, residual, scale: c.frobenius_norm() })
}
