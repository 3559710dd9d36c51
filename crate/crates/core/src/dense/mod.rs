//! Dense kernels sized for subspace dimensions: orthonormalization, thin QR,
//! least squares, eigenpairs and small factorizations.

mod eig;
mod factor;
mod lsq;
mod matrix;
mod ortho;
mod qr;

pub use eig::{by_modulus, dense_eig, eigenvalues, hermitian_eig, schur, EigenPairs, Schur, DENSE_EIG_CAP};
pub use factor::{hermitian_solve, Cholesky, Lu};
pub use lsq::{hessenberg_lsq, Givens, GivensLsq, LeastSquaresResult};
pub use matrix::DenseMatrix;
pub use ortho::{orthonormalize_against, Orthonormalized, BREAKDOWN_TOL};
pub use qr::{right_divide_upper, solve_upper, thin_qr, thin_qr_with_tol, ThinQr};
