//! LU factorization with partial pivoting.

use super::matrix::{Matrix, Vector, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative pivot threshold, scaled by the dimension and the largest entry.
const PIVOT_EPS: f64 = 16.0 * f64::EPSILON;

/// `P·A = L·U` packed into one matrix (unit lower triangle implicit).
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = n as f64 * PIVOT_EPS * a.max_abs();

        for k in 0..n {
            let (p, pmag) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= threshold {
                return Err(Error::Singular(format!("zero pivot in column {k} of a {n}x{n} system")));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, x: &mut [C64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
    }

    pub fn solve_vec(&self, b: &Vector) -> Result<Vector> {
        if b.len() != self.dim() {
            return Err(Error::Shape(format!("right-hand side has length {}, expected {}", b.len(), self.dim())));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        self.solve_in_place(&mut x);
        Ok(Vector::new_unchecked(x))
    }

    pub fn solve_mat(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.dim() {
            return Err(Error::Shape(format!("right-hand side has {} rows, expected {}", b.rows(), self.dim())));
        }
        let mut out = Matrix::zeros(b.rows(), b.cols());
        let mut col = vec![ZERO; self.dim()];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(self.perm[i], j)];
            }
            self.solve_in_place(&mut col);
            for (i, c) in col.iter().enumerate() {
                out[(i, j)] = *c;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Matrix {
        self.solve_mat(&Matrix::identity(self.dim())).expect("identity has matching shape")
    }

    pub fn determinant(&self) -> C64 {
        let n = self.dim();
        let mut det = (0..n).fold(ONE, |acc, i| acc * self.lu[(i, i)]);
        // parity of the permutation
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                det = -det;
            }
        }
        det
    }
}

/// Solves `A·X = B` for square `A`.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve_mat(b)
}

/// Solves `X·A = B` for square `A`, i.e. `X = B·A⁻¹`.
pub fn solve_right(b: &Matrix, a: &Matrix) -> Result<Matrix> {
    Ok(Lu::factor(&a.adjoint())?.solve_mat(&b.adjoint())?.adjoint())
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Ok(Lu::factor(a)?.inverse())
}
