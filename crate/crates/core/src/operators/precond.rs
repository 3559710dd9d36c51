use crate::dense::DenseMatrix;
use crate::vector::Vector;
use crate::C64;

/// Right preconditioner action `v -> M^{-1} v`.
///
/// A flexible preconditioner may return a different linear map on every
/// call, which is why `apply` takes `&mut self`.
pub trait Preconditioner {
    fn dim(&self) -> usize;

    fn apply(&mut self, v: &[C64]) -> Vector;

    fn is_flexible(&self) -> bool {
        false
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for &mut P {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        (**self).apply(v)
    }

    fn is_flexible(&self) -> bool {
        (**self).is_flexible()
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        (**self).apply(v)
    }

    fn is_flexible(&self) -> bool {
        (**self).is_flexible()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Identity {
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl Preconditioner for Identity {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        v.to_vec()
    }
}

/// Diagonal scaling by the inverse of the matrix diagonal.
#[derive(Clone, Debug)]
pub struct Jacobi {
    inv_diag: Vector,
}

impl Jacobi {
    /// Zero diagonal entries are left unscaled.
    pub fn new(diag: &[C64]) -> Self {
        let inv_diag = diag
            .iter()
            .map(|&d| if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d.inv() })
            .collect();
        Self { inv_diag }
    }
}

impl Preconditioner for Jacobi {
    fn dim(&self) -> usize {
        self.inv_diag.len()
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        v.iter().zip(&self.inv_diag).map(|(x, d)| x * d).collect()
    }
}

/// Explicit dense approximation of `M^{-1}`.
#[derive(Clone, Debug)]
pub struct DensePreconditioner {
    inv: DenseMatrix,
}

impl DensePreconditioner {
    pub fn new(inv: DenseMatrix) -> Self {
        Self { inv }
    }
}

impl Preconditioner for DensePreconditioner {
    fn dim(&self) -> usize {
        self.inv.rows()
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        self.inv.mul_vec(v)
    }
}

/// Preconditioner from a closure; flagged flexible unless told otherwise.
pub struct FnPreconditioner<F> {
    n: usize,
    flexible: bool,
    f: F,
}

impl<F: FnMut(&[C64]) -> Vector> FnPreconditioner<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, flexible: true, f }
    }

    pub fn fixed(mut self) -> Self {
        self.flexible = false;
        self
    }
}

impl<F: FnMut(&[C64]) -> Vector> Preconditioner for FnPreconditioner<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        (self.f)(v)
    }

    fn is_flexible(&self) -> bool {
        self.flexible
    }
}
