//! Seeded random data for test problems. Every generator takes an explicit
//! RNG so that runs are reproducible from a single seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::{thin_qr, DenseMatrix};
use crate::vector::Vector;
use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal(rng: &mut SeededRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn complex_vector(rng: &mut SeededRng, n: usize) -> Vector {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn real_vector(rng: &mut SeededRng, n: usize) -> Vector {
    (0..n).map(|_| C64::new(rng.sample(StandardNormal), 0.0)).collect()
}

pub fn complex_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn real_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), 0.0))
}

/// Haar-distributed unitary matrix (orthogonal when `real` is set).
pub fn unitary(rng: &mut SeededRng, n: usize, real: bool) -> DenseMatrix {
    let g = if real { real_matrix(rng, n, n) } else { complex_matrix(rng, n, n) };
    thin_qr(&g).expect("square Gaussian matrix").q
}

/// `cols` orthonormal columns of length `n`.
pub fn orthonormal_columns(rng: &mut SeededRng, n: usize, cols: usize) -> DenseMatrix {
    thin_qr(&complex_matrix(rng, n, cols)).expect("tall Gaussian matrix").q
}

/// Random Hermitian positive definite matrix with eigenvalues drawn uniformly from `[lo, hi]`.
pub fn hpd_matrix(rng: &mut SeededRng, n: usize, lo: f64, hi: f64) -> DenseMatrix {
    let q = unitary(rng, n, false);
    let d: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(lo..=hi), 0.0)).collect();
    let qd = q.matmul(&DenseMatrix::diagonal(&d));
    let a = qd.matmul(&q.adjoint());
    a.add(&a.adjoint()).scaled(C64::new(0.5, 0.0))
}
