//! Moore-Penrose pseudoinverse and the weighted least-squares formulas.
//!
//! Full-rank matrices go through the closed forms (`A⁻¹`, `[AᴴA]⁻¹Aᴴ`,
//! `Aᴴ[AAᴴ]⁻¹`), evaluated with LU solves instead of explicit inverses.
//! Rank-deficient matrices go through the SVD with `σ⁺ = 1/σ` above the
//! cutoff and zero below it.

use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::{lu, svd, Matrix, Qr, Svd, Vector, C64};

/// Default relative threshold for the `b ∈ span(A)` test.
pub const DEFAULT_SPAN_TOL: f64 = 1e-10;

/// Tolerance used to cross-check the two limit forms against each other.
const LIMIT_AGREEMENT_TOL: f64 = 1e-8;

/// The ten shape/rank/span classes of `A·x = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseCode {
    /// `M = N = r`
    C1a,
    /// `M = N > r`, `b` in span
    C1b,
    /// `M = N > r`, `b` not in span
    C1c,
    /// `M > N = r`, `b` in span
    C2a,
    /// `M > N = r`, `b` not in span
    C2b,
    /// `M > N > r`, `b` in span
    C2c,
    /// `M > N > r`, `b` not in span
    C2d,
    /// `N > M = r`
    C3a,
    /// `N > M > r`, `b` in span
    C3b,
    /// `N > M > r`, `b` not in span
    C3c,
}

impl CaseCode {
    pub const ALL: [CaseCode; 10] = [
        CaseCode::C1a,
        CaseCode::C1b,
        CaseCode::C1c,
        CaseCode::C2a,
        CaseCode::C2b,
        CaseCode::C2c,
        CaseCode::C2d,
        CaseCode::C3a,
        CaseCode::C3b,
        CaseCode::C3c,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseCode::C1a => "1a",
            CaseCode::C1b => "1b",
            CaseCode::C1c => "1c",
            CaseCode::C2a => "2a",
            CaseCode::C2b => "2b",
            CaseCode::C2c => "2c",
            CaseCode::C2d => "2d",
            CaseCode::C3a => "3a",
            CaseCode::C3b => "3b",
            CaseCode::C3c => "3c",
        }
    }

    /// Classification from shape, rank and the span test.
    pub fn from_parts(m: usize, n: usize, r: usize, b_in_span: bool) -> CaseCode {
        use std::cmp::Ordering::*;
        match m.cmp(&n) {
            Equal if r == n => CaseCode::C1a,
            Equal if b_in_span => CaseCode::C1b,
            Equal => CaseCode::C1c,
            Greater if r == n && b_in_span => CaseCode::C2a,
            Greater if r == n => CaseCode::C2b,
            Greater if b_in_span => CaseCode::C2c,
            Greater => CaseCode::C2d,
            Less if r == m => CaseCode::C3a,
            Less if b_in_span => CaseCode::C3b,
            Less => CaseCode::C3c,
        }
    }
}

impl fmt::Display for CaseCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseLabel {
    pub code: CaseCode,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub b_in_span: bool,
}

/// Residuals of the four Penrose conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenroseReport {
    /// `AA⁺A = A`, `A⁺AA⁺ = A⁺`, `(AA⁺)ᴴ = AA⁺`, `(A⁺A)ᴴ = A⁺A`, each as
    /// a relative Frobenius residual.
    pub residuals: [f64; 4],
    pub pass: bool,
}

/// Diagonal of nonnegative error (or solution) weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(Vec<f64>);

impl WeightMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if let Some(w) = diag.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Domain(format!("weights must be finite and nonnegative, got {w}")));
        }
        Ok(Self(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn diag(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Which formula produced a pseudoinverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinvRoute {
    /// Square nonsingular: `A⁻¹`.
    Inverse,
    /// Full column rank: `[AᴴA]⁻¹Aᴴ`.
    Overdetermined,
    /// Full row rank: `Aᴴ[AAᴴ]⁻¹`.
    Underdetermined,
    /// Rank deficient: SVD with reciprocal singular values above the cutoff.
    Svd,
}

fn nonempty(a: &Matrix) -> Result<()> {
    if a.is_empty() {
        Err(Error::Shape(format!("pseudoinverse of an empty {}x{} matrix", a.rows(), a.cols())))
    } else {
        Ok(())
    }
}

/// `A⁺ = V·diag(σ⁺)·Uᴴ` with `σ⁺ = 1/σ` for `σ > tol`, else 0.
pub fn pinv_from_svd(s: &Svd, tol: Option<f64>) -> Matrix {
    let tol = tol.unwrap_or_else(|| s.default_tol());
    let inv: Vec<f64> = s.sigma.iter().map(|&x| if x > tol { 1.0 / x } else { 0.0 }).collect();
    &s.v.scale_cols(&inv) * &s.u.adjoint()
}

pub fn pinv_svd(a: &Matrix, tol: Option<f64>) -> Result<Matrix> {
    nonempty(a)?;
    Ok(pinv_from_svd(&svd(a)?, tol))
}

/// Closed-form pseudoinverse for full-rank matrices; a singular Gram matrix
/// is reported as [`Error::Singular`].
pub fn pinv_analytic(a: &Matrix) -> Result<(Matrix, PinvRoute)> {
    nonempty(a)?;
    let ah = a.adjoint();
    let (m, n) = a.shape();
    if m == n {
        Ok((lu::inverse(a)?, PinvRoute::Inverse))
    } else if m > n {
        Ok((lu::solve(&(&ah * a), &ah)?, PinvRoute::Overdetermined))
    } else {
        Ok((lu::solve_right(&ah, &(a * &ah))?, PinvRoute::Underdetermined))
    }
}

/// Pseudoinverse with the route that produced it.
pub fn pinv_with_route(a: &Matrix, tol: Option<f64>) -> Result<(Matrix, PinvRoute)> {
    nonempty(a)?;
    let s = svd(a)?;
    let r = s.rank(tol);
    if r > 0 && r == a.rows().min(a.cols()) {
        match pinv_analytic(a) {
            Ok(found) => return Ok(found),
            // numerically full rank but too ill-conditioned for the Gram route
            Err(Error::Singular(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((pinv_from_svd(&s, tol), PinvRoute::Svd))
}

pub fn pinv(a: &Matrix, tol: Option<f64>) -> Result<Matrix> {
    pinv_with_route(a, tol).map(|(p, _)| p)
}

/// Classifies `(A, b)` into one of the ten cases. `tol` is the relative
/// threshold of the span test `‖AA⁺b − b‖ ≤ tol·max(1, ‖b‖)`.
pub fn classify_case(a: &Matrix, b: &Vector, tol: Option<f64>) -> Result<CaseLabel> {
    nonempty(a)?;
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Shape(format!("b has length {}, A has {m} rows", b.len())));
    }
    let tol = tol.unwrap_or(DEFAULT_SPAN_TOL);
    let s = svd(a)?;
    let r = s.rank(None);
    let b_in_span = if r == m {
        true
    } else {
        // AA⁺ is the orthogonal projector onto the leading r left singular vectors
        let ur = Matrix::from_fn(m, r, |i, j| s.u[(i, j)]);
        let coeffs = &ur.adjoint() * b;
        let proj = &ur * &coeffs;
        (&proj - b).norm2() <= tol * b.norm2().max(1.0)
    };
    Ok(CaseLabel { code: CaseCode::from_parts(m, n, r, b_in_span), m, n, r, b_in_span })
}

/// `[AᴴA + δ²I]⁻¹Aᴴ`, checked against `Aᴴ[AAᴴ + δ²I]⁻¹`.
///
/// Both forms are evaluated on the square triangular core of a thin QR of
/// `A` (or of `Aᴴ` when `A` is wide), which avoids forming the Gram matrix
/// on the rank-deficient side where rounding would swamp `δ²`.
pub fn limit_pinv(a: &Matrix, delta: f64) -> Result<Matrix> {
    nonempty(a)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let d2 = C64::new(delta * delta, 0.0);
    let shift = |g: Matrix| {
        let k = g.rows();
        &g + &Matrix::identity(k).scale(d2)
    };
    let (m, n) = a.shape();
    let (first, second) = if m >= n {
        let Qr { q, r } = Qr::factor(a)?;
        let rh = r.adjoint();
        let qh = q.adjoint();
        // (RᴴR + δ²)⁻¹ Rᴴ Qᴴ  versus  Rᴴ (RRᴴ + δ²)⁻¹ Qᴴ
        let f1 = &lu::solve(&shift(&rh * &r), &rh)? * &qh;
        let f2 = &lu::solve_right(&rh, &shift(&r * &rh))? * &qh;
        (f1, f2)
    } else {
        let Qr { q, r } = Qr::factor(&a.adjoint())?;
        let rh = r.adjoint();
        // Q (RRᴴ + δ²)⁻¹ R  versus  Q R (RᴴR + δ²)⁻¹
        let f1 = &q * &lu::solve(&shift(&r * &rh), &r)?;
        let f2 = &q * &lu::solve_right(&r, &shift(&rh * &r))?;
        (f1, f2)
    };
    let gap = (&first - &second).frobenius_norm();
    if gap > LIMIT_AGREEMENT_TOL * first.frobenius_norm().max(1.0) {
        return Err(Error::Internal(format!("the two regularized forms differ by {gap:e}")));
    }
    Ok(first)
}

fn relative(residual: &Matrix, reference: &Matrix) -> f64 {
    let r = residual.frobenius_norm();
    let s = reference.frobenius_norm();
    if s > 0.0 {
        r / s
    } else {
        r
    }
}

pub fn verify_penrose(a: &Matrix, aplus: &Matrix, tol: f64) -> Result<PenroseReport> {
    let (m, n) = a.shape();
    if aplus.shape() != (n, m) {
        return Err(Error::Shape(format!(
            "candidate is {}x{}, expected {n}x{m} for a {m}x{n} matrix",
            aplus.rows(),
            aplus.cols()
        )));
    }
    let aap = a * aplus;
    let apa = aplus * a;
    let residuals = [
        relative(&(&(&aap * a) - a), a),
        relative(&(&(&apa * aplus) - aplus), aplus),
        relative(&(&aap.adjoint() - &aap), &aap),
        relative(&(&apa.adjoint() - &apa), &apa),
    ];
    Ok(PenroseReport { residuals, pass: residuals.iter().all(|&r| r <= tol) })
}

/// Least-squares solution from the normal equations `AᴴA·x = Aᴴb`.
pub fn solve_normal_equations(a: &Matrix, b: &Vector) -> Result<Vector> {
    nonempty(a)?;
    if b.len() != a.rows() {
        return Err(Error::Shape(format!("b has length {}, A has {} rows", b.len(), a.rows())));
    }
    let ah = a.adjoint();
    let gram = &ah * a;
    let lu = lu::Lu::factor(&gram).map_err(|e| match e {
        Error::Singular(_) => {
            Error::Singular("AᴴA is singular (A lacks full column rank); use the pseudoinverse instead".into())
        }
        other => other,
    })?;
    lu.solve_vec(&(&ah * b))
}

/// Weighted error pseudoinverse `[AᴴWᴴWA]⁻¹AᴴWᴴW`; `x = A⁺b` minimizes
/// `εᴴWᴴWε` with `ε = Ax − b`.
pub fn weighted_pinv_over(a: &Matrix, w: &WeightMatrix) -> Result<Matrix> {
    nonempty(a)?;
    if w.len() != a.rows() {
        return Err(Error::Shape(format!("{} weights for {} equations", w.len(), a.rows())));
    }
    let wa = a.scale_rows(w.diag());
    let rhs = wa.adjoint().scale_cols(w.diag());
    lu::solve(&(&wa.adjoint() * &wa), &rhs).map_err(|e| match e {
        Error::Singular(_) => Error::Singular("weighted normal matrix AᴴWᴴWA is singular".into()),
        other => other,
    })
}

/// Weighted norm pseudoinverse `[WᴴW]⁻¹Aᴴ[A[WᴴW]⁻¹Aᴴ]⁻¹`; among the exact
/// solutions of `Ax = b`, `x = A⁺b` minimizes `‖Wx‖₂`.
pub fn weighted_pinv_under(a: &Matrix, w: &WeightMatrix) -> Result<Matrix> {
    nonempty(a)?;
    if w.len() != a.cols() {
        return Err(Error::Shape(format!("{} weights for {} unknowns", w.len(), a.cols())));
    }
    if let Some(k) = w.diag().iter().position(|&x| x <= 0.0) {
        return Err(Error::Domain(format!("weight {k} is zero; WᴴW must be invertible")));
    }
    let p: Vec<f64> = w.diag().iter().map(|x| 1.0 / (x * x)).collect();
    let pah = a.adjoint().scale_rows(&p);
    let gram = a * &pah;
    lu::solve_right(&pah, &gram).map_err(|e| match e {
        Error::Singular(_) => Error::Singular("A[WᴴW]⁻¹Aᴴ is singular (A lacks full row rank)".into()),
        other => other,
    })
}

/// `x = A⁺b + (I − A⁺A)·y`: the minimum-norm solution plus a null-space
/// component selected by `y`.
pub fn general_solution(a: &Matrix, b: &Vector, y: &Vector) -> Result<Vector> {
    nonempty(a)?;
    let (m, n) = a.shape();
    if b.len() != m || y.len() != n {
        return Err(Error::Shape(format!(
            "expected b of length {m} and y of length {n}, got {} and {}",
            b.len(),
            y.len()
        )));
    }
    let ap = pinv(a, None)?;
    let x0 = &ap * b;
    let apy = &ap * &(a * y);
    Ok(&x0 + &(y - &apy))
}
