use super::{eig, DenseMatrix};
use crate::error::{Error, Result};
use crate::vector;
use crate::C64;

/// Complex plane rotation acting on rows `(i, k)`:
/// `[x_i; x_k] <- [c, s; -conj(s), c] [x_i; x_k]`.
#[derive(Clone, Copy, Debug)]
pub struct Givens {
    pub i: usize,
    pub k: usize,
    pub c: f64,
    pub s: C64,
}

impl Givens {
    /// Rotation that zeroes `b` against `a`.
    pub fn zeroing(i: usize, k: usize, a: C64, b: C64) -> Self {
        if b.norm() == 0.0 {
            return Self { i, k, c: 1.0, s: C64::new(0.0, 0.0) };
        }
        if a.norm() == 0.0 {
            return Self { i, k, c: 0.0, s: b.conj() / b.norm() };
        }
        let an = a.norm();
        let r = an.hypot(b.norm());
        Self { i, k, c: an / r, s: (a / an) * b.conj() / r }
    }

    #[inline]
    pub fn apply(&self, x: &mut [C64]) {
        let (xi, xk) = (x[self.i], x[self.k]);
        x[self.i] = self.c * xi + self.s * xk;
        x[self.k] = -self.s.conj() * xi + self.c * xk;
    }
}

/// Incremental QR of a growing `(rows x j)` least-squares matrix by Givens rotations.
///
/// Columns may have arbitrary fill below the diagonal; each pushed column is
/// reduced against the diagonal with as many rotations as needed, so the
/// Hessenberg case costs one new rotation per column.
#[derive(Clone, Debug)]
pub struct GivensLsq {
    rotations: Vec<Givens>,
    r_cols: Vec<Vec<C64>>,
    g: Vec<C64>,
}

impl GivensLsq {
    pub fn new(rhs: &[C64]) -> Self {
        Self { rotations: Vec::new(), r_cols: Vec::new(), g: rhs.to_vec() }
    }

    pub fn ncols(&self) -> usize {
        self.r_cols.len()
    }

    /// Appends one column (length = current row count, rows may grow) and
    /// returns the updated least-squares residual norm.
    pub fn push_column(&mut self, column: &[C64]) -> f64 {
        let j = self.r_cols.len();
        let mut col = column.to_vec();
        if col.len() > self.g.len() {
            self.g.resize(col.len(), C64::new(0.0, 0.0));
        }
        col.resize(self.g.len().max(j + 1), C64::new(0.0, 0.0));
        if self.g.len() < col.len() {
            self.g.resize(col.len(), C64::new(0.0, 0.0));
        }
        for rot in &self.rotations {
            rot.apply(&mut col);
        }
        for k in j + 1..col.len() {
            if col[k].norm() != 0.0 {
                let rot = Givens::zeroing(j, k, col[j], col[k]);
                rot.apply(&mut col);
                col[k] = C64::new(0.0, 0.0);
                rot.apply(&mut self.g);
                self.rotations.push(rot);
            }
        }
        col.truncate(j + 1);
        self.r_cols.push(col);
        self.residual_norm()
    }

    pub fn residual_norm(&self) -> f64 {
        let j = self.r_cols.len();
        if self.g.len() > j {
            vector::norm(&self.g[j..])
        } else {
            0.0
        }
    }

    /// Minimizer of the current problem; singular triangles fall back to the
    /// minimum-norm solution and set `rank_deficient`.
    pub fn solve(&self) -> Result<LeastSquaresResult> {
        let j = self.r_cols.len();
        let r = DenseMatrix::from_fn(j, j, |a, b| if a <= b { self.r_cols[b][a] } else { C64::new(0.0, 0.0) });
        let gmax = (0..j).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
        let singular = (0..j).any(|i| r[(i, i)].norm() <= 1e-14 * gmax) || gmax == 0.0;
        let rhs = &self.g[..j];
        let residual_norm = self.residual_norm();
        if !singular {
            let y = super::qr::solve_upper(&r, rhs)?;
            return Ok(LeastSquaresResult { solution: y, residual_norm, rank_deficient: false });
        }
        let y = min_norm_triangular(&r, rhs)?;
        // residual of the basic problem grows by the part of g the deficient R cannot reach
        let ry = r.mul_vec(&y);
        let extra = vector::norm(&vector::sub(rhs, &ry));
        Ok(LeastSquaresResult {
            solution: y,
            residual_norm: residual_norm.hypot(extra),
            rank_deficient: true,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LeastSquaresResult {
    pub solution: Vec<C64>,
    pub residual_norm: f64,
    pub rank_deficient: bool,
}

/// `argmin ||c - H y||` for a `(j+1) x j` (or taller) matrix through Givens QR.
pub fn hessenberg_lsq(h: &DenseMatrix, c: &[C64]) -> Result<LeastSquaresResult> {
    if h.cols() == 0 {
        return Err(Error::invalid("hessenberg_lsq needs at least one column"));
    }
    if h.rows() < h.cols() {
        return Err(Error::invalid("hessenberg_lsq needs rows >= cols"));
    }
    crate::error::check_len(h.rows(), c.len())?;
    let mut lsq = GivensLsq::new(c);
    for j in 0..h.cols() {
        lsq.push_column(h.col(j));
    }
    lsq.solve()
}

// Minimum-norm solution of a square rank-deficient triangular system through
// the eigendecomposition of R^H R.
fn min_norm_triangular(r: &DenseMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = r.cols();
    let gram = r.adjoint().matmul(r);
    let (vals, vecs) = eig::hermitian_eig(&gram)?;
    let vmax = vals.iter().cloned().fold(0.0, f64::max);
    let rhg = r.adjoint_mul_vec(rhs);
    let mut y = vector::zeros(n);
    for (i, &mu) in vals.iter().enumerate() {
        if mu > 1e-24 * vmax.max(f64::MIN_POSITIVE) && mu > 0.0 {
            let u = vecs.col(i);
            let coef = vector::dot(u, &rhg) / mu;
            vector::axpy(coef, u, &mut y);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn trivial_column() {
        let h = DenseMatrix::from_real_rows(&[&[1.0], &[0.0]]);
        let out = hessenberg_lsq(&h, &[c64(2.5, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!((out.solution[0] - c64(2.5, 0.0)).norm() < 1e-15);
        assert!(out.residual_norm < 1e-15);
    }

    #[test]
    fn column_orthogonal_to_rhs() {
        let h = DenseMatrix::from_real_rows(&[&[0.0], &[1.0]]);
        let out = hessenberg_lsq(&h, &[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!(out.solution[0].norm() < 1e-15);
        assert!((out.residual_norm - 1.0).abs() < 1e-15);
        assert!(!out.rank_deficient);
    }

    #[test]
    fn zero_column_flags_min_norm() {
        let h = DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let out = hessenberg_lsq(&h, &[c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!(out.rank_deficient);
        assert!((out.solution[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(out.solution[1].norm() < 1e-12);
        assert!((out.residual_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn givens_zeroes_complex_entry() {
        let mut x = vec![c64(1.0, 2.0), c64(-0.5, 0.25)];
        let rot = Givens::zeroing(0, 1, x[0], x[1]);
        rot.apply(&mut x);
        assert!(x[1].norm() < 1e-15);
        assert!((x[0].norm() - (5.0f64 + 0.3125).sqrt()).abs() < 1e-14);
    }
}
