use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Cholesky factor `G = L L^H` of a Hermitian positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    /// Fails with [`Error::IndefiniteGram`] when a pivot drops to
    /// `1e-14 * max diag` or below.
    pub fn factor(g: &DenseMatrix) -> Result<Self> {
        let k = g.rows();
        if k != g.cols() {
            return Err(Error::invalid("Cholesky needs a square matrix"));
        }
        let dmax = (0..k).map(|i| g[(i, i)].re.abs()).fold(0.0, f64::max);
        let floor = 1e-14 * dmax;
        let mut l = DenseMatrix::zeros(k, k);
        for j in 0..k {
            let mut d = g[(j, j)].re;
            for p in 0..j {
                d -= l[(j, p)].norm_sqr();
            }
            if !(d > floor) {
                return Err(Error::IndefiniteGram { column: j, pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = C64::new(djj, 0.0);
            for i in j + 1..k {
                let mut s = g[(i, j)];
                for p in 0..j {
                    s -= l[(i, p)] * l[(j, p)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor_l(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let k = self.dim();
        assert_eq!(rhs.len(), k);
        let mut y = rhs.to_vec();
        for i in 0..k {
            let mut s = y[i];
            for p in 0..i {
                s -= self.l[(i, p)] * y[p];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..k).rev() {
            let mut s = y[i];
            for p in i + 1..k {
                s -= self.l[(p, i)].conj() * y[p];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn solve(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let cols: Vec<_> = (0..rhs.cols()).map(|j| self.solve_vec(rhs.col(j))).collect();
        DenseMatrix::from_columns(self.dim(), &cols)
    }
}

/// Solves `G X = rhs` for Hermitian positive definite `G`.
pub fn hermitian_solve(g: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    let scale = g.frobenius_norm().max(f64::MIN_POSITIVE);
    if g.sub(&g.adjoint()).frobenius_norm() > 1e-12 * scale {
        return Err(Error::invalid("hermitian_solve: matrix is not Hermitian"));
    }
    if rhs.rows() != g.rows() {
        return Err(Error::DimensionMismatch { expected: g.rows(), got: rhs.rows() });
    }
    Ok(Cholesky::factor(g)?.solve(rhs))
}

/// LU factorization with partial pivoting for small nonsymmetric systems.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::invalid("LU needs a square matrix"));
        }
        let scale = a.frobenius_norm();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= 1e-15 * scale || pmax == 0.0 {
                return Err(Error::SingularDense(k));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                y[i] = y[i] - l * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }

    pub fn solve(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let cols: Vec<_> = (0..rhs.cols()).map(|j| self.solve_vec(rhs.col(j))).collect();
        DenseMatrix::from_columns(self.lu.rows(), &cols)
    }
}
