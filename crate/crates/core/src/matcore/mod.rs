//! Dense matrix and vector arithmetic, factorizations, norms and the
//! structured-matrix builders the rest of the crate works with.

pub mod io;
pub mod lu;
mod matrix;
pub mod qr;
pub mod structured;
pub mod svd;

pub use lu::Lu;
pub use matrix::{Matrix, Vector, C64};
pub use qr::Qr;
pub use structured::{
    build_circulant, build_convolution_matrix, build_dft_matrix, circulant_eigen_check, l0_count, lp_norm,
    CirculantEigen,
};
pub use svd::{rank, svd, Svd};
