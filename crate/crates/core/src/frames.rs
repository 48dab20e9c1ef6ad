//! Bases, dual bases, frames and tight frames.
//!
//! A frame is stored through its synthesis matrix `S` (`d×n`), whose columns
//! are the frame vectors. Analysis is `c = Sᴴx`, synthesis is `x = S·c`, and
//! the frame bounds are the extreme eigenvalues of `S·Sᴴ`.

use crate::error::{Error, Result};
use crate::matcore::{lu, svd, Matrix, Vector, C64};
use crate::pinv::pinv_svd;

pub const DEFAULT_TIGHT_TOL: f64 = 1e-6;
/// The three-vector example frame has its entries rounded to three digits,
/// so its bounds only agree to about this relative accuracy.
pub const MERCEDES_TIGHT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSystem {
    synthesis: Matrix,
}

impl FrameSystem {
    /// Frame vectors are the columns of `synthesis`.
    pub fn new(synthesis: Matrix) -> Result<Self> {
        if synthesis.is_empty() {
            return Err(Error::Shape("frame needs at least one vector of positive dimension".into()));
        }
        Ok(Self { synthesis })
    }

    /// Frame whose analysis operator is `w`, i.e. whose vectors are the
    /// conjugated rows of `w`. `from_analysis(build_dft_matrix(n))` gives the
    /// DFT as a frame.
    pub fn from_analysis(w: &Matrix) -> Result<Self> {
        Self::new(w.adjoint())
    }

    pub fn synthesis(&self) -> &Matrix {
        &self.synthesis
    }

    pub fn d(&self) -> usize {
        self.synthesis.rows()
    }

    pub fn n(&self) -> usize {
        self.synthesis.cols()
    }

    pub fn vector(&self, k: usize) -> Vector {
        self.synthesis.col(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameReport {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    pub redundancy: f64,
    pub is_orthobasis: bool,
}

pub fn frame_bounds(f: &FrameSystem) -> Result<FrameReport> {
    frame_bounds_with_tol(f, DEFAULT_TIGHT_TOL)
}

/// `tol` is the relative gap `(upper − lower)/upper` still called tight; it
/// also decides unit norm and `lower = 1` for the orthobasis flag.
pub fn frame_bounds_with_tol(f: &FrameSystem, tol: f64) -> Result<FrameReport> {
    let (d, n) = f.synthesis.shape();
    if n < d {
        return Err(Error::NotAFrame { lower: 0.0 });
    }
    let s = svd(&f.synthesis)?;
    let smin = s.sigma[d - 1];
    if smin <= s.default_tol() {
        return Err(Error::NotAFrame { lower: 0.0 });
    }
    let upper = s.sigma[0] * s.sigma[0];
    let lower = smin * smin;
    let tight = (upper - lower) <= tol * upper;
    let unit_norm = (0..n).all(|k| (f.vector(k).norm2() - 1.0).abs() <= tol);
    let ratio = n as f64 / d as f64;
    let redundancy = if unit_norm || !tight { ratio } else { lower };
    Ok(FrameReport { lower, upper, tight, redundancy, is_orthobasis: tight && (lower - 1.0).abs() <= tol && n == d })
}

/// Inverse of a square basis matrix; its rows are the dual basis vectors.
pub fn dual_basis(f: &Matrix) -> Result<Matrix> {
    if !f.is_square() {
        return Err(Error::Shape(format!("dual basis needs a square matrix, got {}x{}", f.rows(), f.cols())));
    }
    lu::inverse(f).map_err(|_| Error::Singular("basis vectors are linearly dependent".into()))
}

fn require_full_row_rank(f: &FrameSystem) -> Result<()> {
    frame_bounds(f).map(|_| ())
}

/// Canonical dual `G = S⁺` (`n×d`), so that `S·G = I`.
pub fn dual_frame(f: &FrameSystem) -> Result<Matrix> {
    require_full_row_rank(f)?;
    pinv_svd(&f.synthesis, None)
}

/// Dual built by appending the `(n−d)×n` rows `extra` below `S`, inverting
/// the square result and keeping its first `d` columns. Different `extra`
/// give different duals; all satisfy `S·G = I`.
pub fn dual_frame_augmented(f: &FrameSystem, extra: &Matrix) -> Result<Matrix> {
    let (d, n) = f.synthesis.shape();
    if extra.shape() != (n - d.min(n), n) {
        return Err(Error::Shape(format!(
            "augmentation needs a {}x{n} block, got {}x{}",
            n.saturating_sub(d),
            extra.rows(),
            extra.cols()
        )));
    }
    require_full_row_rank(f)?;
    let stacked = Matrix::from_fn(n, n, |i, j| if i < d { f.synthesis[(i, j)] } else { extra[(i - d, j)] });
    let inv = lu::inverse(&stacked)
        .map_err(|_| Error::Singular("added rows are not independent of the frame rows".into()))?;
    Ok(inv.select(&(0..n).collect::<Vec<_>>(), &(0..d).collect::<Vec<_>>()))
}

/// Coefficients `c_k = (f_k, x)`.
pub fn analyze(f: &FrameSystem, x: &Vector) -> Result<Vector> {
    f.synthesis.adjoint().mul_vec(x)
}

/// `x = Σ c_k f_k`.
pub fn synthesize(f: &FrameSystem, c: &Vector) -> Result<Vector> {
    f.synthesis.mul_vec(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalReport {
    pub energy_signal: f64,
    pub energy_coeffs: f64,
    pub constant: f64,
}

pub fn parseval_check(f: &FrameSystem, x: &Vector) -> Result<ParsevalReport> {
    let c = analyze(f, x)?;
    let energy_signal = x.norm2().powi(2);
    if energy_signal == 0.0 {
        return Err(Error::Domain("energy ratio undefined for the zero signal".into()));
    }
    let energy_coeffs = c.norm2().powi(2);
    Ok(ParsevalReport { energy_signal, energy_coeffs, constant: energy_coeffs / energy_signal })
}

/// Three unit vectors 120° apart in the plane, entries rounded to `0.866`.
pub fn mercedes_frame() -> FrameSystem {
    FrameSystem { synthesis: Matrix::from_real_rows(&[[1.0, -0.5, -0.5], [0.0, 0.866, -0.866]]) }
}

/// `n` unit vectors in the plane at angles `offset + 2πk/n`.
pub fn harmonic_frame(n: usize, offset: f64) -> Result<FrameSystem> {
    if n == 0 {
        return Err(Error::Shape("harmonic frame needs at least one vector".into()));
    }
    let step = std::f64::consts::TAU / n as f64;
    let s = Matrix::from_fn(2, n, |i, k| {
        let t = offset + step * k as f64;
        C64::new(if i == 0 { t.cos() } else { t.sin() }, 0.0)
    });
    FrameSystem::new(s)
}

/// Rotates every vector of a planar frame by `theta` radians.
pub fn rotate_frame(f: &FrameSystem, theta: f64) -> Result<FrameSystem> {
    if f.d() != 2 {
        return Err(Error::Shape(format!("rotation needs a planar frame, got dimension {}", f.d())));
    }
    let (s, c) = theta.sin_cos();
    let r = Matrix::from_real_rows(&[[c, -s], [s, c]]);
    FrameSystem::new(&r * &f.synthesis)
}
