//! Instance generators and brute-force reference computations shared by the
//! integration tests. Nothing here calls the library's solvers.

#![allow(dead_code, clippy::needless_range_loop)]

use lpsolve::pinv::CaseCode;
use lpsolve::{Matrix, Vector, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn int_matrix(rng: &mut StdRng, m: usize, n: usize) -> Vec<Vec<i64>> {
    (0..m).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect()
}

pub fn int_product(b: &[Vec<i64>], c: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = c.len();
    let n = c[0].len();
    b.iter().map(|row| (0..n).map(|j| (0..inner).map(|k| row[k] * c[k][j]).sum()).collect()).collect()
}

/// Exact rank of an integer matrix by fraction-free elimination.
pub fn exact_rank(a: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                m[i][j] = (m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn to_matrix(a: &[Vec<i64>]) -> Matrix {
    let rows: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    Matrix::from_real_rows(&rows)
}

pub fn to_vector(v: &[i64]) -> Vector {
    Vector::from_real(&v.iter().map(|&x| x as f64).collect::<Vec<_>>())
}

/// Integer matrix of exact rank `r`, built as a product of `m×r` and `r×n` factors.
pub fn int_matrix_of_rank(rng: &mut StdRng, m: usize, n: usize, r: usize) -> Vec<Vec<i64>> {
    loop {
        let a = int_product(&int_matrix(rng, m, r), &int_matrix(rng, r, n));
        if exact_rank(&a) == r {
            return a;
        }
    }
}

/// Shape `(m, n, r)` and span flag that realize a case, drawn at random with
/// `m, n ≤ 8`.
pub fn case_shape(rng: &mut StdRng, code: CaseCode) -> (usize, usize, usize, bool) {
    use CaseCode::*;
    match code {
        C1a => {
            let n = rng.gen_range(1..=8);
            (n, n, n, true)
        }
        C1b | C1c => {
            let n = rng.gen_range(2..=8);
            (n, n, rng.gen_range(1..n), code == C1b)
        }
        C2a | C2b => {
            let n = rng.gen_range(1..=7);
            (rng.gen_range(n + 1..=8), n, n, code == C2a)
        }
        C2c | C2d => {
            let n = rng.gen_range(2..=7);
            (rng.gen_range(n + 1..=8), n, rng.gen_range(1..n), code == C2c)
        }
        C3a => {
            let m = rng.gen_range(1..=7);
            (m, rng.gen_range(m + 1..=8), m, true)
        }
        C3b | C3c => {
            let m = rng.gen_range(2..=7);
            (m, rng.gen_range(m + 1..=8), rng.gen_range(1..m), code == C3b)
        }
    }
}

/// Random integer instance `(A, b)` of the requested case. Span membership
/// is decided exactly: `b = A·z` for in-span cases, otherwise
/// `rank([A | b]) = rank(A) + 1`.
pub fn case_instance(rng: &mut StdRng, code: CaseCode) -> (Matrix, Vector) {
    let (m, n, r, in_span) = case_shape(rng, code);
    let a = int_matrix_of_rank(rng, m, n, r);
    let b: Vec<i64> = if in_span {
        let z: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        a.iter().map(|row| row.iter().zip(&z).map(|(x, y)| x * y).sum()).collect()
    } else {
        loop {
            let b: Vec<i64> = (0..m).map(|_| rng.gen_range(-5..=5)).collect();
            let aug: Vec<Vec<i64>> =
                a.iter().zip(&b).map(|(row, bi)| row.iter().copied().chain([*bi]).collect()).collect();
            if exact_rank(&aug) == r + 1 {
                break b;
            }
        }
    };
    (to_matrix(&a), to_vector(&b))
}

pub fn uniform_rows(rng: &mut StdRng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

pub fn uniform_matrix(rng: &mut StdRng, m: usize, n: usize) -> Matrix {
    Matrix::from_real_rows(&uniform_rows(rng, m, n))
}

pub fn uniform_vector(rng: &mut StdRng, n: usize) -> Vector {
    Vector::from_real(&(0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())
}

pub fn complex_vector(rng: &mut StdRng, n: usize) -> Vector {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn rows_of(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)].re).collect()).collect()
}

pub fn max_error(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(b).map(|(row, bi)| (row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bi).abs()).fold(0.0, f64::max)
}

/// Minimax error of `a·x ≈ b` for one or two unknowns by repeated grid
/// refinement (the objective is convex, so zooming in on the best cell
/// keeps the optimum inside the window).
pub fn grid_minimax(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = a[0].len();
    let mut center = vec![0.0; n];
    let mut half = 1e3f64.max(b.iter().map(|v| v.abs()).fold(0.0, f64::max) * 1e3);
    let steps: i64 = if n == 1 { 2000 } else { 100 };
    let mut best = f64::INFINITY;
    for _ in 0..40 {
        if half < 1e-13 {
            break;
        }
        let mut best_x = center.clone();
        let mut x = vec![0.0; n];
        let visit = |x: &[f64], best: &mut f64, best_x: &mut Vec<f64>| {
            let e = max_error(a, b, x);
            if e < *best {
                *best = e;
                best_x.copy_from_slice(x);
            }
        };
        if n == 1 {
            for i in -steps..=steps {
                x[0] = center[0] + half * i as f64 / steps as f64;
                visit(&x, &mut best, &mut best_x);
            }
        } else {
            for i in -steps..=steps {
                for j in -steps..=steps {
                    x[0] = center[0] + half * i as f64 / steps as f64;
                    x[1] = center[1] + half * j as f64 / steps as f64;
                    visit(&x, &mut best, &mut best_x);
                }
            }
        }
        center = best_x;
        half *= 4.0 / steps as f64;
    }
    best
}

/// Solves a small dense real system by Gaussian elimination with partial
/// pivoting; `None` if a pivot falls below `1e-12` relative.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| r.iter().copied().chain([bi]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(c, p);
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..=n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Smallest L1 norm over the exact solutions of a wide system `a·x = b`,
/// by enumerating the basic solutions (an optimal one is always basic).
pub fn min_l1_basic(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let (m, n) = (a.len(), a[0].len());
    combinations(n, m)
        .into_iter()
        .filter_map(|cols| {
            let sub: Vec<Vec<f64>> = a.iter().map(|row| cols.iter().map(|&j| row[j]).collect()).collect();
            gauss_solve(&sub, b).map(|x| x.iter().map(|v| v.abs()).sum::<f64>())
        })
        .fold(f64::INFINITY, f64::min)
}

/// `x_t = (1/n)·Σ_k Y_k·e^{+2πi·tk/n}` summed directly.
pub fn inverse_dft_direct(y: &[C64]) -> Vec<C64> {
    let n = y.len();
    (0..n)
        .map(|t| {
            y.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (k, &yk)| {
                let theta = 2.0 * std::f64::consts::PI * ((t * k) % n) as f64 / n as f64;
                acc + yk * C64::new(theta.cos(), theta.sin())
            }) / n as f64
        })
        .collect()
}

/// `Y_k = Σ_t x_t·e^{−2πi·tk/n}` summed directly.
pub fn dft_direct(x: &[C64]) -> Vec<C64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (t, &xt)| {
                let theta = -2.0 * std::f64::consts::PI * ((t * k) % n) as f64 / n as f64;
                acc + xt * C64::new(theta.cos(), theta.sin())
            })
        })
        .collect()
}

/// Random `k`-subset of `0..n`, sorted.
pub fn subset(rng: &mut StdRng, n: usize, k: usize) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

pub fn max_abs_diff(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}
