//! Recovering a linear operator `A` from experiments `A·x_k = b_k`.
//!
//! Inputs are stacked as the columns of `X` (`N×P`) and outputs as the
//! columns of `B` (`M×P`), so `A·X = B`.

use crate::error::{Error, Result};
use crate::matcore::{lu, rank, Matrix, Vector, C64};
use crate::pinv::pinv;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSet {
    inputs: Matrix,
    outputs: Matrix,
}

impl ExperimentSet {
    pub fn new(inputs: Matrix, outputs: Matrix) -> Result<Self> {
        if inputs.cols() != outputs.cols() {
            return Err(Error::Shape(format!(
                "{} input experiments but {} output experiments",
                inputs.cols(),
                outputs.cols()
            )));
        }
        Ok(Self { inputs, outputs })
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn outputs(&self) -> &Matrix {
        &self.outputs
    }

    /// Number of experiments `P`.
    pub fn len(&self) -> usize {
        self.inputs.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `A = B·X⁻¹` from exactly `N` independent experiments.
pub fn fit_operator_exact(e: &ExperimentSet) -> Result<Matrix> {
    let x = &e.inputs;
    if !x.is_square() {
        return Err(Error::Shape(format!(
            "exact fit needs as many experiments as input dimensions ({}x{} inputs); use the least-squares fit",
            x.rows(),
            x.cols()
        )));
    }
    lu::solve_right(&e.outputs, x).map_err(|err| match err {
        Error::Singular(_) => Error::Singular("experiment inputs are not independent".into()),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFit {
    pub operator: Matrix,
    /// Inputs had rank below `N`; the operator is the minimum Frobenius
    /// norm one among all least-squares fits.
    pub rank_deficient: bool,
}

/// `A = B·X⁺`, minimizing `‖A·X − B‖_F`.
pub fn fit_operator_ls(e: &ExperimentSet) -> Result<OperatorFit> {
    let rank_deficient = rank(&e.inputs, None)? < e.inputs.rows();
    let operator = e.outputs.matmul(&pinv(&e.inputs, None)?)?;
    Ok(OperatorFit { operator, rank_deficient })
}

/// Weights `w` with `xₖᵀw ≈ bₖ` in the least-squares sense, for scalar
/// outputs (`M = 1`): `w = (Xᵀ)⁺·Bᵀ`.
pub fn linear_regression(e: &ExperimentSet) -> Result<Vector> {
    if e.outputs.rows() != 1 {
        return Err(Error::Shape(format!("regression needs one output row, got {}", e.outputs.rows())));
    }
    let xt = e.inputs.transpose();
    let bt = e.outputs.row(0);
    pinv(&xt, None)?.mul_vec(&bt)
}

/// Nearest circulant (in Frobenius norm) to a square matrix: each cyclic
/// diagonal is replaced by its average.
pub fn project_circulant(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!("circulant projection needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut h = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            h[(i + n - j) % n] += a[(i, j)];
        }
    }
    let scale = 1.0 / n as f64;
    Ok(Matrix::from_fn(n, n, |i, j| h[(i + n - j) % n] * scale))
}
