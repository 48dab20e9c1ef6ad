use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense row-major matrix of complex doubles.
///
/// Real data is stored with zero imaginary parts; every routine in the
/// crate treats the real case as a special case of the complex one.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Dense vector of complex doubles.
#[derive(Clone, PartialEq)]
pub struct Vector {
    data: Vec<C64>,
}

fn check_finite(data: &[C64]) -> Result<()> {
    match data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(k) => Err(Error::Domain(format!("non-finite entry at position {k}"))),
        None => Ok(()),
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries supplied for a {rows}x{cols} matrix", data.len())));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Builds a real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "ragged rows");
            data.extend(r.iter().map(|&v| C64::new(v, 0.0)));
        }
        Self { rows: m, cols: n, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let m = columns.first().map_or(0, Vector::len);
        if columns.iter().any(|c| c.len() != m) {
            return Err(Error::Shape("columns have different lengths".into()));
        }
        Ok(Self::from_fn(m, columns.len(), |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::new_unchecked(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> Vector {
        Vector::new_unchecked((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn set_col(&mut self, j: usize, v: &Vector) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Matrix {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        self.map(|z| z * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &Vector) -> Result<Vector> {
        if self.cols != x.len() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} matrix by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(Vector::new_unchecked(
            (0..self.rows)
                .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(x.iter()).map(|(&a, &b)| a * b).sum())
                .collect(),
        ))
    }

    fn zip_with(&self, other: &Matrix, op: &str, f: impl Fn(C64, C64) -> C64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "subtract", |a, b| a - b)
    }

    /// Sub-matrix at the given row and column indices, in the order given.
    pub fn select(&self, row_idx: &[usize], col_idx: &[usize]) -> Matrix {
        Matrix::from_fn(row_idx.len(), col_idx.len(), |i, j| self[(row_idx[i], col_idx[j])])
    }

    /// Left-multiplies by `diag(d)`.
    pub fn scale_rows(&self, d: &[f64]) -> Matrix {
        assert_eq!(d.len(), self.rows);
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[i])
    }

    /// Right-multiplies by `diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Matrix {
        assert_eq!(d.len(), self.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j])
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.shape() == other.shape() && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    /// Panics on mismatched shapes; use [`Matrix::matmul`] for a checked product.
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Mul<&Vector> for &Matrix {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        self.mul_vec(rhs).expect("matrix-vector product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    if z.im == 0.0 {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Vector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        check_finite(&data)?;
        Ok(Self { data })
    }

    pub(crate) fn new_unchecked(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self { data: data.iter().map(|&v| C64::new(v, 0.0)).collect() }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: vec![ZERO; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.data.iter()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.data
    }

    /// Real parts of the entries.
    pub fn re(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Inner product `(self, other) = selfᴴ·other`.
    pub fn dot(&self, other: &Vector) -> C64 {
        assert_eq!(self.len(), other.len());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Vector {
        Vector { data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: f64) -> Vector {
        self.map(|z| z * s)
    }

    pub fn select(&self, idx: &[usize]) -> Vector {
        Vector { data: idx.iter().map(|&i| self.data[i]).collect() }
    }

    /// The vector as an n×1 matrix.
    pub fn to_column(&self) -> Matrix {
        Matrix { rows: self.len(), cols: 1, data: self.data.clone() }
    }

    pub fn approx_eq(&self, other: &Vector, tol: f64) -> bool {
        self.len() == other.len() && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl FromIterator<C64> for Vector {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        Vector { data: iter.into_iter().collect() }
    }
}

impl Index<usize> for Vector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "vector sum length mismatch");
        self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect()
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "vector difference length mismatch");
        self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect()
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .data
            .iter()
            .map(|z| if z.im == 0.0 { format!("{:.6}", z.re) } else { format!("{:.6}{:+.6}i", z.re, z.im) })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
