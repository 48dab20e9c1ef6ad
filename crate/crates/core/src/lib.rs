//! Generalized inverses and L_p approximation for `A·x = b`.
//!
//! * [`matcore`]: dense complex matrices, LU/QR/SVD, norms, DFT and
//!   convolution builders.
//! * [`pinv`]: Moore-Penrose pseudoinverse, the ten-case classification of
//!   `(A, b)`, weighted least squares and minimum weighted norm solutions.
//! * [`irls`]: iterative reweighted least squares for `l_p` equation error
//!   and minimum `l_p` norm solutions, minimax and sparse presets.
//! * [`frames`]: frame bounds, tight frames, dual bases and dual frames.
//! * [`partition`]: mixed known/unknown systems `F·X = Y`, sparse DFT
//!   recovery with known support, band-limited reconstruction.
//! * [`opfit`]: fitting an operator from input/output experiments.
//! * [`cli`]: the batch front end used by the `lpsolve` binary.

pub mod cli;
pub mod error;
pub mod frames;
pub mod irls;
pub mod matcore;
pub mod opfit;
pub mod partition;
pub mod pinv;

pub use error::{Error, Result};
pub use matcore::{Matrix, Vector, C64};
