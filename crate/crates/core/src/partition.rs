//! Square systems `F·X = Y` where some entries of `X` and the rest of `Y`
//! are known.
//!
//! Rows of `F` are reordered so the `K` unknown outputs come first and
//! columns so the `K` known inputs come first, giving
//!
//! ```text
//! [Y1]   [A B] [X1]
//! [Y2] = [C D] [X2]
//! ```
//!
//! with `X1`, `Y2` known. Then `X2 = D⁻¹(Y2 − C·X1)` and `Y1 = A·X1 + B·X2`.
//! With `F` the DFT this covers recovery of a spectrum known to vanish off
//! a support from as many time samples, and reconstruction of a band-limited
//! signal from samples.

use crate::error::{Error, Result};
use crate::matcore::{build_dft_matrix, lu::Lu, Matrix, Vector, C64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    n: usize,
    known_x_idx: Vec<usize>,
    known_y_idx: Vec<usize>,
}

fn check_indices(name: &str, idx: &[usize], n: usize) -> Result<()> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::Index(format!("{name} index {bad} out of range for size {n}")));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Index(format!("{name} indices must be strictly increasing")));
    }
    Ok(())
}

fn complement(idx: &[usize], n: usize) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in idx {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

impl PartitionSpec {
    /// `known_x_idx` holds the `K` positions of given inputs, `known_y_idx`
    /// the `n − K` positions of given outputs; both sorted, 0-based.
    pub fn new(n: usize, known_x_idx: Vec<usize>, known_y_idx: Vec<usize>) -> Result<Self> {
        check_indices("known x", &known_x_idx, n)?;
        check_indices("known y", &known_y_idx, n)?;
        if known_x_idx.len() + known_y_idx.len() != n {
            return Err(Error::Index(format!(
                "{} known inputs and {} known outputs do not add up to {n}",
                known_x_idx.len(),
                known_y_idx.len()
            )));
        }
        Ok(Self { n, known_x_idx, known_y_idx })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of known inputs, equal to the number of unknown outputs.
    pub fn k(&self) -> usize {
        self.known_x_idx.len()
    }

    pub fn known_x_idx(&self) -> &[usize] {
        &self.known_x_idx
    }

    pub fn known_y_idx(&self) -> &[usize] {
        &self.known_y_idx
    }

    pub fn unknown_x_idx(&self) -> Vec<usize> {
        complement(&self.known_x_idx, self.n)
    }

    pub fn unknown_y_idx(&self) -> Vec<usize> {
        complement(&self.known_y_idx, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedSystem {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
    /// Original row index of each reordered row: unknown outputs, then known.
    pub row_perm: Vec<usize>,
    /// Original column index of each reordered column: known inputs, then unknown.
    pub col_perm: Vec<usize>,
}

impl PartitionedSystem {
    /// Undoes the reordering, returning the original `F`.
    pub fn reassemble(&self) -> Matrix {
        let k = self.a.rows();
        let n = self.row_perm.len();
        let mut f = Matrix::zeros(n, n);
        for (i, &ri) in self.row_perm.iter().enumerate() {
            for (j, &cj) in self.col_perm.iter().enumerate() {
                f[(ri, cj)] = match (i < k, j < k) {
                    (true, true) => self.a[(i, j)],
                    (true, false) => self.b[(i, j - k)],
                    (false, true) => self.c[(i - k, j)],
                    (false, false) => self.d[(i - k, j - k)],
                };
            }
        }
        f
    }
}

fn check_square(f: &Matrix, n: usize) -> Result<()> {
    if f.shape() != (n, n) {
        return Err(Error::Shape(format!("expected a {n}x{n} matrix, got {}x{}", f.rows(), f.cols())));
    }
    Ok(())
}

pub fn partition(f: &Matrix, spec: &PartitionSpec) -> Result<PartitionedSystem> {
    check_square(f, spec.n)?;
    let uy = spec.unknown_y_idx();
    let ux = spec.unknown_x_idx();
    let kx = &spec.known_x_idx;
    let ky = &spec.known_y_idx;
    Ok(PartitionedSystem {
        a: f.select(&uy, kx),
        b: f.select(&uy, &ux),
        c: f.select(ky, kx),
        d: f.select(ky, &ux),
        row_perm: uy.iter().chain(ky).copied().collect(),
        col_perm: kx.iter().chain(&ux).copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSolution {
    /// Outputs at `spec.unknown_y_idx()`.
    pub y_unknown: Vector,
    /// Inputs at `spec.unknown_x_idx()`.
    pub x_unknown: Vector,
}

fn scatter(n: usize, parts: [(&[usize], &Vector); 2]) -> Vector {
    let mut out = Vector::zeros(n);
    for (idx, vals) in parts {
        for (&i, &z) in idx.iter().zip(vals.iter()) {
            out[i] = z;
        }
    }
    out
}

impl PartitionSolution {
    /// Full input vector `X`.
    pub fn x(&self, spec: &PartitionSpec, x_known: &Vector) -> Vector {
        scatter(spec.n, [(&spec.known_x_idx, x_known), (&spec.unknown_x_idx(), &self.x_unknown)])
    }

    /// Full output vector `Y`.
    pub fn y(&self, spec: &PartitionSpec, y_known: &Vector) -> Vector {
        scatter(spec.n, [(&spec.known_y_idx, y_known), (&spec.unknown_y_idx(), &self.y_unknown)])
    }
}

/// Fills in the unknown halves of `X` and `Y`. Fails if the `D` block
/// (known outputs against unknown inputs) is singular.
pub fn partition_solve(
    f: &Matrix,
    spec: &PartitionSpec,
    x_known: &Vector,
    y_known: &Vector,
) -> Result<PartitionSolution> {
    if x_known.len() != spec.k() || y_known.len() != spec.n - spec.k() {
        return Err(Error::Shape(format!(
            "expected {} known inputs and {} known outputs, got {} and {}",
            spec.k(),
            spec.n - spec.k(),
            x_known.len(),
            y_known.len()
        )));
    }
    let p = partition(f, spec)?;
    let x_unknown = if p.d.is_empty() {
        Vector::zeros(0)
    } else {
        let rhs = y_known - &(&p.c * x_known);
        Lu::factor(&p.d)
            .map_err(|_| {
                Error::Singular("D block singular: the known outputs do not determine the unknown inputs".into())
            })?
            .solve_vec(&rhs)?
    };
    let y_unknown = &(&p.a * x_known) + &(&p.b * &x_unknown);
    Ok(PartitionSolution { y_unknown, x_unknown })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRecovery {
    /// Length-`n` spectrum, zero off the support.
    pub spectrum: Vector,
    /// Dimension of the final linear solve; always `K`.
    pub solve_size: usize,
}

const VERIFY_TOL: f64 = 1e-8;

fn check_distinct(name: &str, idx: &[usize], n: usize) -> Result<()> {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    check_indices(name, &sorted, n)
}

/// Inverse DFT entry `(F⁻¹)_{t,k} = e^{+2πi·tk/n}/n`.
fn inverse_dft_block(n: usize, rows: &[usize], cols: &[usize]) -> Result<Matrix> {
    let w = build_dft_matrix(n)?;
    Ok(w.select(rows, cols).map(|z| z.conj() / n as f64))
}

/// Spectrum of a signal whose DFT is supported on `support_idx`, from its
/// values at `sample_idx` (as many samples as support points).
///
/// Eliminating the unknown time samples leaves a `K×K` system whose matrix
/// is the inverse of the Schur complement `A − B·D⁻¹·C`; that matrix is the
/// inverse-DFT submatrix on (sample rows, support columns), so only it is
/// formed and solved.
pub fn sparse_dft_recover(
    samples: &Vector,
    sample_idx: &[usize],
    support_idx: &[usize],
    n: usize,
) -> Result<SparseRecovery> {
    let k = support_idx.len();
    if samples.len() != k || sample_idx.len() != k {
        return Err(Error::Shape(format!(
            "need as many samples as support points: {} samples, {} sample positions, {k} support points",
            samples.len(),
            sample_idx.len()
        )));
    }
    if k > n {
        return Err(Error::Shape(format!("support of size {k} exceeds length {n}")));
    }
    check_distinct("sample", sample_idx, n)?;
    check_distinct("support", support_idx, n)?;
    let mut spectrum = Vector::zeros(n);
    if k == 0 {
        return Ok(SparseRecovery { spectrum, solve_size: 0 });
    }
    let g = inverse_dft_block(n, sample_idx, support_idx)?;
    let y1 = Lu::factor(&g)
        .map_err(|_| Error::RecoveryFailure("the samples do not determine the spectrum on this support".into()))?
        .solve_vec(samples)?;
    let check = &(&g * &y1) - samples;
    let scale = samples.max_abs().max(f64::MIN_POSITIVE);
    let worst = check.max_abs();
    if worst.is_nan() || worst > VERIFY_TOL * scale.max(1.0) {
        return Err(Error::RecoveryFailure(format!("recovered spectrum reproduces the samples only to {worst:.3e}")));
    }
    for (&i, &z) in support_idx.iter().zip(y1.iter()) {
        spectrum[i] = z;
    }
    Ok(SparseRecovery { spectrum, solve_size: k })
}

fn sorted_pairs(idx: &[usize], vals: &Vector) -> (Vec<usize>, Vector) {
    let mut pairs: Vec<(usize, C64)> = idx.iter().copied().zip(vals.iter().copied()).collect();
    pairs.sort_by_key(|&(i, _)| i);
    (pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
}

/// Full time signal whose DFT vanishes outside `band_idx`, from its values
/// at `sample_idx` (as many samples as band points).
pub fn bandlimited_reconstruct(samples: &Vector, sample_idx: &[usize], band_idx: &[usize], n: usize) -> Result<Vector> {
    if samples.len() != sample_idx.len() || samples.len() != band_idx.len() {
        return Err(Error::Shape(format!(
            "need as many samples as band points: {} samples, {} sample positions, {} band points",
            samples.len(),
            sample_idx.len(),
            band_idx.len()
        )));
    }
    check_distinct("band", band_idx, n)?;
    let (sidx, svals) = sorted_pairs(sample_idx, samples);
    let mut band = band_idx.to_vec();
    band.sort_unstable();
    let spec = PartitionSpec::new(n, sidx, complement(&band, n))?;
    let f = build_dft_matrix(n)?;
    let zeros = Vector::zeros(n - band.len());
    let sol = partition_solve(&f, &spec, &svals, &zeros).map_err(|e| match e {
        Error::Singular(msg) => Error::RecoveryFailure(msg),
        other => other,
    })?;
    Ok(sol.x(&spec, &svals))
}
