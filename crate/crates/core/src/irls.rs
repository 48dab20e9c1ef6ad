//! Iterative reweighted least squares.
//!
//! [`irls_over`] minimizes `‖Ax − b‖_p` for tall systems by repeatedly
//! solving weighted least-squares problems with weights `|e_n|^{(pk−2)/2}`.
//! [`irls_under`] finds the minimum `‖x‖_p` exact solution of a wide
//! system by repeated minimum weighted norm solves with weights
//! `|x_n|^{(2−pk)/2}`. Both start from the pseudoinverse solution with
//! `pk = 2` and move `pk` geometrically toward the target `p` (homotopy),
//! optionally blending each new solution with the previous one.

use crate::error::{Error, Result};
use crate::matcore::{io::format_real, lp_norm, lu, rank, Matrix, Qr, Vector, C64};
use crate::pinv::{pinv, pinv_svd};

/// Relative change below which a run is reported as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Relative change that ends a run early when early stopping is enabled.
pub const EARLY_STOP_TOL: f64 = 1e-12;

/// How each new weighted solution `x̂` is combined with the previous `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateMode {
    /// `x ← x̂`
    Full,
    /// `x ← q·x̂ + (1−q)·x` with a fixed `q` in `(0, 1]`.
    Partial(f64),
    /// `q = 1/(pk − 1)`, which turns the iteration into Newton's method.
    Newton,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrlsOptions {
    /// Target exponent.
    pub p: f64,
    /// Homotopy factor `K`: `pk` is multiplied by it (or by `1/K`, whichever
    /// moves toward `p`) every iteration until it reaches `p`.
    pub homotopy_factor: f64,
    pub max_iters: usize,
    /// `None` picks Newton for `p ≥ 2` and full replacement below.
    pub update_mode: Option<UpdateMode>,
    /// Added to the solution weights of the underdetermined iteration and
    /// used as the smallest error magnitude when `pk < 2` overdetermined.
    pub weight_floor: f64,
    pub trace: bool,
    /// Stop once the relative change drops below [`EARLY_STOP_TOL`].
    pub early_stop: bool,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self::over(10.0)
    }
}

impl IrlsOptions {
    /// Overdetermined defaults: `K = 2`, 10 iterations.
    pub fn over(p: f64) -> Self {
        Self {
            p,
            homotopy_factor: 2.0,
            max_iters: 10,
            update_mode: None,
            weight_floor: 1e-5,
            trace: false,
            early_stop: false,
        }
    }

    /// Underdetermined defaults: `K = 0.8`, 10 iterations.
    pub fn under(p: f64) -> Self {
        Self { homotopy_factor: 0.8, ..Self::over(p) }
    }

    /// Large-`p` preset used by [`minimax_solve`].
    pub fn minimax() -> Self {
        Self { max_iters: 60, ..Self::over(50.0) }
    }

    /// `p = 1.1` preset used by [`sparse_solve`].
    pub fn sparse() -> Self {
        Self { max_iters: 100, ..Self::under(1.1) }
    }

    pub fn with_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_mode(mut self, mode: UpdateMode) -> Self {
        self.update_mode = Some(mode);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.p.is_nan() || self.p <= 0.0 {
            return Err(Error::Domain(format!("p must be positive, got {}", self.p)));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("at least one iteration is required".into()));
        }
        if !(self.homotopy_factor > 0.0 && self.homotopy_factor.is_finite()) {
            return Err(Error::Domain(format!("homotopy factor must be positive, got {}", self.homotopy_factor)));
        }
        if !(self.weight_floor >= 0.0 && self.weight_floor.is_finite()) {
            return Err(Error::Domain(format!("weight floor must be nonnegative, got {}", self.weight_floor)));
        }
        if let Some(UpdateMode::Partial(q)) = self.update_mode {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::Domain(format!("partial update factor must lie in (0, 1], got {q}")));
            }
        }
        Ok(())
    }

    fn mode(&self) -> UpdateMode {
        self.update_mode.unwrap_or(if self.p >= 2.0 { UpdateMode::Newton } else { UpdateMode::Full })
    }

    fn next_pk(&self, pk: f64) -> f64 {
        let k = self.homotopy_factor;
        if self.p >= 2.0 {
            self.p.min(k.max(1.0 / k) * pk)
        } else {
            self.p.max(k.min(1.0 / k) * pk)
        }
    }
}

fn blend_factor(mode: UpdateMode, pk: f64) -> Result<f64> {
    let q = match mode {
        UpdateMode::Full => 1.0,
        UpdateMode::Partial(q) => q,
        UpdateMode::Newton => 1.0 / (pk - 1.0),
    };
    if q.is_finite() && q > 0.0 {
        Ok(q)
    } else {
        Err(Error::Domain(format!("Newton update undefined at pk = {pk}")))
    }
}

/// One iteration of the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub pk: f64,
    pub q: f64,
    /// `‖e‖_p` (overdetermined, error before the update) or `‖x‖_p`
    /// (underdetermined, after the update); see the solver docs for which norm.
    pub error_norm: f64,
    /// `‖x_k − x_{k−1}‖ / ‖x_k‖`.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrlsResult {
    pub x: Vector,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    /// Set by [`minimax_solve`] when the iterate was replaced by a certified
    /// equal-error solution.
    pub refined: bool,
}

/// Trace as CSV with columns `iter,pk,q,error_norm`.
pub fn trace_to_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::from("iter,pk,q,error_norm\n");
    for r in trace {
        out.push_str(&format!("{},{},{},{}\n", r.iter, format_real(r.pk), format_real(r.q), format_real(r.error_norm)));
    }
    out
}

/// `|v|^expo` for every entry, rescaled by the largest entry (in the log
/// domain, so large exponents cannot overflow) and normalized to unit sum.
fn normalized_powers(mags: &[f64], expo: f64) -> Vec<f64> {
    if expo == 0.0 {
        let n = mags.len() as f64;
        return vec![1.0 / n; mags.len()];
    }
    let anchor = if expo > 0.0 {
        mags.iter().copied().fold(0.0, f64::max)
    } else {
        mags.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let ln_anchor = anchor.ln();
    let raw: Vec<f64> =
        mags.iter().map(|&m| if m == 0.0 { 0.0 } else { (expo * (m.ln() - ln_anchor)).exp() }).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn relative_step(new: &Vector, old: &Vector) -> f64 {
    let d = (new - old).norm2();
    let s = new.norm2();
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

fn blend(q: f64, fresh: &Vector, prev: &Vector) -> Vector {
    if q == 1.0 {
        return fresh.clone();
    }
    fresh.iter().zip(prev.iter()).map(|(a, b)| a * q + b * (1.0 - q)).collect()
}

/// `l_p` equation-error minimization for `M ≥ N`, full column rank.
///
/// Each iteration computes `e = Ax − b`, weights `w_n = |e_n|^{(pk−2)/2}`
/// normalized to unit sum, and the weighted least-squares solution
/// `x̂ = [AᴴWᴴWA]⁻¹AᴴWᴴWb`. The traced norm is `‖e‖_p` for `p > 2` and
/// `‖e‖_2` otherwise, measured before the update.
pub fn irls_over(a: &Matrix, b: &Vector, opts: &IrlsOptions) -> Result<IrlsResult> {
    opts.validate()?;
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Shape(format!("b has length {}, A has {m} rows", b.len())));
    }
    if m < n {
        return Err(Error::Shape(format!("overdetermined IRLS needs M >= N, got {m}x{n}")));
    }
    if rank(a, None)? < n {
        return Err(Error::Singular("A lacks full column rank".into()));
    }
    let mode = opts.mode();
    let nn = if opts.p > 2.0 { opts.p } else { 2.0 };

    let mut x = &pinv(a, None)? * b;
    let mut pk = 2.0;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;

    for k in 1..=opts.max_iters {
        pk = opts.next_pk(pk);
        let e = &(a * &x) - b;
        let error_norm = lp_norm(&e, nn)?;
        iterations = k;
        if e.max_abs() == 0.0 {
            // exact fit: every weight would vanish
            last_step = 0.0;
            if opts.trace {
                trace.push(IterationRecord { iter: k, pk, q: 1.0, error_norm, step: 0.0 });
            }
            break;
        }
        let expo = (pk - 2.0) / 2.0;
        let mags: Vec<f64> = e.abs().into_iter().map(|v| if pk < 2.0 { v.max(opts.weight_floor) } else { v }).collect();
        let w = normalized_powers(&mags, expo);

        let wa = a.scale_rows(&w);
        let wb: Vector = b.iter().zip(&w).map(|(z, wi)| z * wi).collect();
        let wah = wa.adjoint();
        let xhat = match lu::Lu::factor(&(&wah * &wa)) {
            Ok(f) => f.solve_vec(&(&wah * &wb))?,
            // weights so skewed that the normal matrix is numerically
            // singular: take the minimum-norm correction of the iterate
            Err(Error::Singular(_)) => {
                let we: Vector = e.iter().zip(&w).map(|(z, wi)| z * wi).collect();
                &x - &(&pinv_svd(&wa, None)? * &we)
            }
            Err(err) => return Err(err),
        };

        let q = blend_factor(mode, pk)?;
        let next = blend(q, &xhat, &x);
        last_step = relative_step(&next, &x);
        x = next;
        if opts.trace {
            trace.push(IterationRecord { iter: k, pk, q, error_norm, step: last_step });
        }
        if opts.early_stop && last_step <= EARLY_STOP_TOL {
            break;
        }
    }
    Ok(IrlsResult { x, iterations, trace, converged: last_step <= CONVERGENCE_TOL, refined: false })
}

/// Minimum `‖x‖_p` subject to `Ax = b` for `M ≤ N`, full row rank.
///
/// Each iteration sets `d_n = |x_n|^{(2−pk)/2} + floor` and solves
/// `x̂ = D·(AD)ᴴ·[(AD)(AD)ᴴ]⁻¹b`, the minimum `‖D⁻¹x‖₂` exact solution.
/// The traced norm is `‖x‖_p` for `p ≥ 2` and `‖x‖_1` otherwise, measured
/// after the update.
pub fn irls_under(a: &Matrix, b: &Vector, opts: &IrlsOptions) -> Result<IrlsResult> {
    opts.validate()?;
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Shape(format!("b has length {}, A has {m} rows", b.len())));
    }
    if m > n {
        return Err(Error::Shape(format!("underdetermined IRLS needs M <= N, got {m}x{n}")));
    }
    if rank(a, None)? < m {
        return Err(Error::Singular("A lacks full row rank".into()));
    }
    let mode = opts.mode();
    let nn = if opts.p >= 2.0 { opts.p } else { 1.0 };

    let mut x = &pinv(a, None)? * b;
    let mut pk = 2.0;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;

    for k in 1..=opts.max_iters {
        pk = opts.next_pk(pk);
        let expo = (2.0 - pk) / 2.0;
        let d: Vec<f64> = x
            .abs()
            .into_iter()
            .map(|v| {
                let base = if expo < 0.0 { v.max(opts.weight_floor) } else { v };
                base.powf(expo) + opts.weight_floor
            })
            .collect();
        let ad = a.scale_cols(&d);
        let adh = ad.adjoint();
        let t = match lu::Lu::factor(&(&ad * &adh)) {
            Ok(f) => &adh * &f.solve_vec(b)?,
            Err(Error::Singular(_)) => &pinv_svd(&ad, None)? * b,
            Err(err) => return Err(err),
        };
        let xhat: Vector = t.iter().zip(&d).map(|(z, di)| z * di).collect();

        let q = blend_factor(mode, pk)?;
        let next = blend(q, &xhat, &x);
        last_step = relative_step(&next, &x);
        x = next;
        iterations = k;
        if opts.trace {
            trace.push(IterationRecord { iter: k, pk, q, error_norm: lp_norm(&x, nn)?, step: last_step });
        }
        if opts.early_stop && last_step <= EARLY_STOP_TOL {
            break;
        }
    }
    Ok(IrlsResult { x, iterations, trace, converged: last_step <= CONVERGENCE_TOL, refined: false })
}

/// Sparse solution of a wide system: [`irls_under`] with `p = 1.1`.
pub fn sparse_solve(a: &Matrix, b: &Vector) -> Result<IrlsResult> {
    sparse_solve_with(a, b, &IrlsOptions::sparse())
}

/// [`irls_under`] followed by debiasing: the system is re-solved exactly on
/// the columns of the `M` largest entries, and that basic solution replaces
/// the iterate when its `l_1` norm is no larger. The `p > 1` iterate
/// concentrates on the right support but keeps small spill-over entries;
/// the exact re-solve removes them.
pub fn sparse_solve_with(a: &Matrix, b: &Vector, opts: &IrlsOptions) -> Result<IrlsResult> {
    let mut result = irls_under(a, b, opts)?;
    if let Some(x) = debias(a, b, &result.x) {
        result.x = x;
        result.refined = true;
    }
    Ok(result)
}

fn l1(x: &Vector) -> f64 {
    x.iter().map(|z| z.norm()).sum()
}

fn debias(a: &Matrix, b: &Vector, x: &Vector) -> Option<Vector> {
    let (m, n) = a.shape();
    if m >= n {
        return None;
    }
    let mags = x.abs();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| mags[j].total_cmp(&mags[i]).then(i.cmp(&j)));
    let mut support = order[..m].to_vec();
    support.sort_unstable();
    let sub = a.select(&(0..m).collect::<Vec<_>>(), &support);
    let xs = lu::Lu::factor(&sub).ok()?.solve_vec(b).ok()?;
    let mut full = Vector::zeros(n);
    for (&j, &z) in support.iter().zip(xs.iter()) {
        full[j] = z;
    }
    let residual = (&(a * &full) - b).norm2();
    (residual <= 1e-10 * b.norm2().max(1.0) && l1(&full) <= l1(x) * (1.0 + 1e-12)).then_some(full)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxReport {
    pub max_error: f64,
    pub num_max_magnitude_errors: usize,
    pub indices: Vec<usize>,
    pub satisfies_characterization: bool,
}

/// Counts the equations whose error magnitude is within `rel_tol` of the
/// largest; a minimax solution has at least `N + 1` of them.
pub fn check_minimax_characterization(a: &Matrix, b: &Vector, x: &Vector, rel_tol: f64) -> Result<MinimaxReport> {
    let (m, n) = a.shape();
    if b.len() != m || x.len() != n {
        return Err(Error::Shape(format!(
            "expected b of length {m} and x of length {n}, got {} and {}",
            b.len(),
            x.len()
        )));
    }
    let mags = (&(a * x) - b).abs();
    let max_error = mags.iter().copied().fold(0.0, f64::max);
    let cutoff = (1.0 - rel_tol) * max_error;
    let indices: Vec<usize> = (0..m).filter(|&i| mags[i] >= cutoff).collect();
    Ok(MinimaxReport {
        max_error,
        num_max_magnitude_errors: indices.len(),
        satisfies_characterization: indices.len() > n,
        indices,
    })
}

/// Chebyshev (minimax) solution of a tall system.
///
/// Runs [`irls_over`] at large `p` (default 50), then levels the result.
/// Any `N + 1` equations have an exact minimax solution with equal error
/// magnitudes (signs from the subsystem's left null vector), and its level
/// is a lower bound for the full problem. Starting from the `N + 1` largest
/// IRLS errors, the worst remaining equation is exchanged into the subset
/// (keeping the exchange that raises the level most) until no equation
/// exceeds the level; that solution is optimal and replaces the iterate.
/// Complex systems skip the levelling step.
pub fn minimax_solve(a: &Matrix, b: &Vector, opts: &IrlsOptions) -> Result<IrlsResult> {
    let mut result = irls_over(a, b, opts)?;
    let (m, n) = a.shape();
    if m > n && a.is_real() && b.is_real() {
        if let Some(x) = level(a, b, &result.x) {
            result.x = x;
            result.refined = true;
        }
    }
    Ok(result)
}

fn level(a: &Matrix, b: &Vector, x: &Vector) -> Option<Vector> {
    let (m, n) = a.shape();
    let errs = (&(a * x) - b).abs();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| errs[j].total_cmp(&errs[i]).then(i.cmp(&j)));
    if errs[order[0]] == 0.0 {
        return None;
    }
    // first usable subset of the N+2 largest errors
    let pool = &order[..(n + 2).min(m)];
    let mut start = vec![pool[..n + 1].to_vec()];
    if pool.len() == n + 2 {
        for drop in (0..=n).rev() {
            start.push(pool.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &i)| i).collect());
        }
    }
    let (mut rows, (mut h, mut xs)) = start.into_iter().find_map(|r| levelled_subsystem(a, b, &r).map(|s| (r, s)))?;
    for _ in 0..4 * m {
        let e = (&(a * &xs) - b).abs();
        let worst = (0..m).max_by(|&i, &j| e[i].total_cmp(&e[j]))?;
        if e[worst] <= h * (1.0 + 1e-9) + f64::MIN_POSITIVE {
            return Some(xs);
        }
        let (next_rows, (next_h, next_x)) = (0..rows.len())
            .filter_map(|drop| {
                let mut r: Vec<usize> = rows.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &i)| i).collect();
                r.push(worst);
                levelled_subsystem(a, b, &r).map(|s| (r, s))
            })
            .max_by(|p, q| p.1 .0.total_cmp(&q.1 .0))?;
        if next_h <= h {
            return None;
        }
        (rows, h, xs) = (next_rows, next_h, next_x);
    }
    None
}

/// Exact minimax solution of the `N + 1` equations in `rows` and its level.
fn levelled_subsystem(a: &Matrix, b: &Vector, rows: &[usize]) -> Option<(f64, Vector)> {
    let n = a.cols();
    let sub = a.select(rows, &(0..n).collect::<Vec<_>>());
    let u = left_null_vector(&sub)?;
    if u.iter().any(|v| v.abs() < 1e-12) {
        return None;
    }
    let k = n + 1;
    let mut aug = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..n {
            aug[(i, j)] = sub[(i, j)];
        }
        aug[(i, n)] = C64::new(-u[i].signum(), 0.0);
    }
    let rhs = b.select(rows);
    let sol = lu::Lu::factor(&aug).ok()?.solve_vec(&rhs).ok()?;
    Some((sol[n].norm(), sol.iter().take(n).copied().collect()))
}

/// Unit vector orthogonal to the columns of a `(N+1)×N` real matrix, or
/// `None` when the columns are dependent.
fn left_null_vector(sub: &Matrix) -> Option<Vec<f64>> {
    let (k, n) = sub.shape();
    let Qr { q, r } = Qr::factor(sub).ok()?;
    let scale = sub.max_abs();
    if (0..n).any(|i| r[(i, i)].norm() <= 1e-12 * scale) {
        return None;
    }
    (0..k)
        .map(|e| {
            let mut v: Vec<f64> = (0..k).map(|i| if i == e { 1.0 } else { 0.0 }).collect();
            for _ in 0..2 {
                for j in 0..n {
                    let proj: f64 = (0..k).map(|i| q[(i, j)].re * v[i]).sum();
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi -= proj * q[(i, j)].re;
                    }
                }
            }
            v
        })
        .map(|v| {
            let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (nrm, v)
        })
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(nrm, v)| v.into_iter().map(|x| x / nrm).collect())
}
