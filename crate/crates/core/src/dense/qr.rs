use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::vector;
use crate::C64;

/// Thin QR factors with `r` carrying a real nonnegative diagonal.
#[derive(Clone, Debug)]
pub struct ThinQr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
    /// Number of diagonal entries of `r` above the rank tolerance.
    pub rank: usize,
}

impl ThinQr {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.r.cols()
    }
}

/// Householder thin QR with the default rank tolerance `1e-14 * ||M||_F`.
pub fn thin_qr(m: &DenseMatrix) -> Result<ThinQr> {
    thin_qr_with_tol(m, 1e-14)
}

/// Householder thin QR; diagonal entries of `R` below `rel_tol * ||M||_F` are set to
/// zero and excluded from the reported rank.
pub fn thin_qr_with_tol(m: &DenseMatrix, rel_tol: f64) -> Result<ThinQr> {
    let (p, q) = (m.rows(), m.cols());
    if p < q {
        return Err(Error::invalid(format!("thin_qr needs rows >= cols, got {p}x{q}")));
    }
    if !m.is_finite() {
        return Err(Error::invalid("thin_qr: non-finite entries"));
    }
    let zero = C64::new(0.0, 0.0);
    let mut a = m.clone();
    let mut reflectors: Vec<(Vec<C64>, f64)> = Vec::with_capacity(q);
    for k in 0..q {
        let x: Vec<C64> = (k..p).map(|i| a[(i, k)]).collect();
        let xnorm = vector::norm(&x);
        if xnorm == 0.0 {
            reflectors.push((Vec::new(), 0.0));
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        // v = x + phase*||x|| e1, maps x to -phase*||x|| e1
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm_sq;
        for j in k..q {
            let s: C64 = (k..p).map(|i| v[i - k].conj() * a[(i, j)]).sum::<C64>() * tau;
            for i in k..p {
                let vi = v[i - k];
                a[(i, j)] -= vi * s;
            }
        }
        reflectors.push((v, tau));
    }

    let mut r = DenseMatrix::zeros(q, q);
    for j in 0..q {
        for i in 0..=j {
            r[(i, j)] = a[(i, j)];
        }
    }
    // Q = H_0 ... H_{q-1} [I; 0]
    let mut qm = DenseMatrix::zeros(p, q);
    for j in 0..q {
        qm[(j, j)] = C64::new(1.0, 0.0);
    }
    for k in (0..q).rev() {
        let (v, tau) = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for j in 0..q {
            let s: C64 = (k..p).map(|i| v[i - k].conj() * qm[(i, j)]).sum::<C64>() * *tau;
            if s == zero {
                continue;
            }
            for i in k..p {
                let vi = v[i - k];
                qm[(i, j)] -= vi * s;
            }
        }
    }
    // make the diagonal of R real and nonnegative
    for k in 0..q {
        let d = r[(k, k)];
        if d.norm() == 0.0 {
            continue;
        }
        let phase = d / d.norm();
        for j in k..q {
            r[(k, j)] *= phase.conj();
        }
        for i in 0..p {
            qm[(i, k)] *= phase;
        }
    }
    let tol = rel_tol * m.frobenius_norm();
    let mut rank = 0;
    for k in 0..q {
        if r[(k, k)].norm() <= tol {
            r[(k, k)] = zero;
        } else {
            rank += 1;
        }
    }
    Ok(ThinQr { q: qm, r, rank })
}

/// Solves `R x = rhs` for upper triangular `R`.
pub fn solve_upper(r: &DenseMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = r.cols();
    let mut x = rhs[..n].to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= r[(i, j)] * x[j];
        }
        let d = r[(i, i)];
        if d.norm() == 0.0 {
            return Err(Error::SingularDense(i));
        }
        x[i] = s / d;
    }
    Ok(x)
}

/// Solves `X R = B` for upper triangular `R` (right division), used to rescale bases.
pub fn right_divide_upper(b: &DenseMatrix, r: &DenseMatrix) -> Result<DenseMatrix> {
    // X R = B  <=>  R^H X^H = B^H, a lower-triangular solve per row of B
    let rh = r.adjoint();
    let k = r.cols();
    let mut out = DenseMatrix::zeros(b.rows(), k);
    for i in 0..b.rows() {
        let rhs: Vec<C64> = (0..k).map(|j| b[(i, j)].conj()).collect();
        let mut y = rhs.clone();
        for p in 0..k {
            let mut s = y[p];
            for q in 0..p {
                s -= rh[(p, q)] * y[q];
            }
            let d = rh[(p, p)];
            if d.norm() == 0.0 {
                return Err(Error::SingularDense(p));
            }
            y[p] = s / d;
        }
        for j in 0..k {
            out[(i, j)] = y[j].conj();
        }
    }
    Ok(out)
}
