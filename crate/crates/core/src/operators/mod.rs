//! System operators, preconditioners, sparse storage and test-problem generators.

mod csr;
mod market;
mod precond;
mod testgen;

pub use csr::CsrMatrix;
pub use market::{read_dense_array, read_matrix_market, read_rhs, write_dense_array, write_matrix_market};
pub use precond::{DensePreconditioner, FnPreconditioner, Identity, Jacobi, Preconditioner};
pub use testgen::{make_test_operator, Mixing, SpectrumSpec, TestOperator};

use crate::dense::DenseMatrix;
use crate::vector::{self, Vector};
use crate::C64;

/// Action `x -> A x` of a square system matrix.
///
/// Adjoint products are never required; projectors that need `W^H A^H` go
/// through a cached `A W` block instead.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[C64]) -> Vector;

    /// Whether the operator claims to be Hermitian.
    fn is_hermitian(&self) -> bool {
        false
    }

    /// Explicit dense copy, built column by column from `apply`.
    fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let cols: Vec<_> = (0..n).map(|j| self.apply(&vector::unit(n, j))).collect();
        DenseMatrix::from_columns(n, &cols)
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[C64]) -> Vector {
        self.mul_vec(x)
    }

    fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= 1e-14
    }

    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[C64]) -> Vector {
        (**self).apply(x)
    }

    fn is_hermitian(&self) -> bool {
        (**self).is_hermitian()
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[C64]) -> Vector {
        (**self).apply(x)
    }

    fn is_hermitian(&self) -> bool {
        (**self).is_hermitian()
    }
}

/// Matrix-free operator from a closure.
pub struct FnOperator<F> {
    n: usize,
    hermitian: bool,
    f: F,
}

impl<F: Fn(&[C64]) -> Vector> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, hermitian: false, f }
    }

    pub fn hermitian(mut self, flag: bool) -> Self {
        self.hermitian = flag;
        self
    }
}

impl<F: Fn(&[C64]) -> Vector> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64]) -> Vector {
        (self.f)(x)
    }

    fn is_hermitian(&self) -> bool {
        self.hermitian
    }
}

/// Applies `op` to each column of `basis`.
pub fn apply_all(op: &dyn LinearOperator, basis: &[Vector]) -> Vec<Vector> {
    basis.iter().map(|w| op.apply(w)).collect()
}
