//! Complex Schur decomposition by Hessenberg reduction and shifted QR, plus
//! the eigenpair extraction built on it.

use std::cmp::Ordering;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::vector;
use crate::C64;

use super::lsq::Givens;

/// Upper bound on the matrix order accepted by the dense eigensolvers.
pub const DENSE_EIG_CAP: usize = 2000;

#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<C64>,
    /// Unit-norm eigenvector estimates, one per column.
    pub vectors: DenseMatrix,
    /// `||B y - theta y||` for each pair.
    pub residuals: Vec<f64>,
    /// Set for values whose QR iteration ran out of sweeps.
    pub unconverged: Vec<bool>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn converged(&self) -> bool {
        !self.unconverged.iter().any(|&u| u)
    }

    /// Reorders all fields by the given permutation of indices.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let cols: Vec<_> = order.iter().map(|&i| self.vectors.col(i).to_vec()).collect();
        Self {
            values: order.iter().map(|&i| self.values[i]).collect(),
            vectors: DenseMatrix::from_columns(self.vectors.rows(), &cols),
            residuals: order.iter().map(|&i| self.residuals[i]).collect(),
            unconverged: order.iter().map(|&i| self.unconverged[i]).collect(),
        }
    }
}

/// Ascending modulus; ties broken by real part then imaginary part.
pub fn by_modulus(a: &C64, b: &C64) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

pub struct Schur {
    pub t: DenseMatrix,
    pub z: DenseMatrix,
    pub unconverged: Vec<bool>,
}

/// `B = Z T Z^H` with `T` upper triangular and `Z` unitary.
pub fn schur(b: &DenseMatrix) -> Result<Schur> {
    let n = b.rows();
    if n != b.cols() {
        return Err(Error::invalid("eigensolver needs a square matrix"));
    }
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_EIG_CAP });
    }
    if !b.is_finite() {
        return Err(Error::invalid("eigensolver: non-finite entries"));
    }
    let (mut h, mut z) = hessenberg(b);
    let unconverged = hessenberg_qr(&mut h, &mut z);
    Ok(Schur { t: h, z, unconverged })
}

fn hessenberg(b: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = b.rows();
    let mut h = b.clone();
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = vector::norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * xnorm;
        let tau = 2.0 / v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // H <- P H P with P = I - tau v v^H acting on rows/cols k+1..n
        for j in 0..n {
            let s: C64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum::<C64>() * tau;
            for i in k + 1..n {
                let vi = v[i - k - 1];
                h[(i, j)] -= vi * s;
            }
        }
        for i in 0..n {
            let s: C64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum::<C64>() * tau;
            for j in k + 1..n {
                let vj = v[j - k - 1].conj();
                h[(i, j)] -= s * vj;
            }
        }
        for i in 0..n {
            let s: C64 = (k + 1..n).map(|j| q[(i, j)] * v[j - k - 1]).sum::<C64>() * tau;
            for j in k + 1..n {
                let vj = v[j - k - 1].conj();
                q[(i, j)] -= s * vj;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

// Single-shift complex QR on an upper Hessenberg matrix, accumulating into `z`.
fn hessenberg_qr(h: &mut DenseMatrix, z: &mut DenseMatrix) -> Vec<bool> {
    let n = h.rows();
    let mut unconverged = vec![false; n];
    if n == 0 {
        return unconverged;
    }
    let eps = f64::EPSILON;
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let max_sweeps = 30 * n.max(1);
    let mut sweeps = 0usize;
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        sweeps += 1;
        iter_since_deflation += 1;
        if sweeps > max_sweeps {
            for flag in unconverged.iter_mut().take(hi + 1) {
                *flag = true;
            }
            break;
        }
        let shift = if iter_since_deflation % 10 == 0 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(h, z, l, hi, shift);
    }
    unconverged
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = d - b * c / (half + disc);
    let mu2 = d - b * c / (half - disc);
    let pick = |m: C64| if m.re.is_finite() && m.im.is_finite() { Some(m) } else { None };
    match (pick(mu1), pick(mu2)) {
        (Some(x), Some(y)) => {
            if (x - d).norm() <= (y - d).norm() {
                x
            } else {
                y
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => d,
    }
}

fn qr_sweep(h: &mut DenseMatrix, z: &mut DenseMatrix, l: usize, hi: usize, shift: C64) {
    let n = h.rows();
    for k in l..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let rot = Givens::zeroing(k, k + 1, h[(k, k)], h[(k + 1, k)]);
        for j in k..n {
            let (a, b) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = rot.c * a + rot.s * b;
            h[(k + 1, j)] = -rot.s.conj() * a + rot.c * b;
        }
        h[(k + 1, k)] = C64::new(0.0, 0.0);
        rots.push(rot);
    }
    // right multiplication by G^H on columns k, k+1
    for (off, rot) in rots.iter().enumerate() {
        let k = l + off;
        // R is upper triangular here, so only rows 0..=k+1 are touched
        for i in 0..k + 2 {
            let (a, b) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = rot.c * a + rot.s.conj() * b;
            h[(i, k + 1)] = -rot.s * a + rot.c * b;
        }
        for i in 0..n {
            let (a, b) = (z[(i, k)], z[(i, k + 1)]);
            z[(i, k)] = rot.c * a + rot.s.conj() * b;
            z[(i, k + 1)] = -rot.s * a + rot.c * b;
        }
    }
    for k in l..=hi {
        h[(k, k)] += shift;
    }
}

/// All eigenpairs of a small dense matrix, ordered by ascending modulus.
pub fn dense_eig(b: &DenseMatrix) -> Result<EigenPairs> {
    let n = b.rows();
    let Schur { t, z, unconverged } = schur(b)?;
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut vectors = DenseMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        values.push(lambda);
        // back substitution on (T - lambda I) x = 0 with x_i = 1
        let mut x = vector::zeros(n);
        x[i] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = C64::new(0.0, 0.0);
            for m in j + 1..=i {
                s += t[(j, m)] * x[m];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            x[j] = -s / d;
        }
        let mut y = z.mul_vec(&x);
        let nrm = vector::norm(&y);
        vector::scale(C64::new(1.0 / nrm, 0.0), &mut y);
        vectors.col_mut(i).copy_from_slice(&y);
    }
    let residuals = (0..n)
        .map(|i| {
            let y = vectors.col(i);
            let by = b.mul_vec(y);
            vector::norm(&vector::sub(&by, &vector::scaled(values[i], y)))
        })
        .collect();
    let pairs = EigenPairs { values, vectors, residuals, unconverged };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| by_modulus(&pairs.values[a], &pairs.values[b]));
    Ok(pairs.permuted(&order))
}

/// Eigenvalues only, ascending modulus.
pub fn eigenvalues(b: &DenseMatrix) -> Result<Vec<C64>> {
    let s = schur(b)?;
    let mut vals: Vec<C64> = (0..b.rows()).map(|i| s.t[(i, i)]).collect();
    vals.sort_by(by_modulus);
    Ok(vals)
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// orthonormal eigenvectors taken from the Schur vectors.
pub fn hermitian_eig(g: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = g.rows();
    // symmetrize to suppress rounding asymmetry before the QR iteration
    let sym = g.add(&g.adjoint()).scaled(C64::new(0.5, 0.0));
    let s = schur(&sym)?;
    if s.unconverged.iter().any(|&u| u) {
        return Err(Error::Degenerate("Hermitian QR iteration did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.t[(a, a)].re.total_cmp(&s.t[(b, b)].re));
    let vals = order.iter().map(|&i| s.t[(i, i)].re).collect();
    let cols: Vec<_> = order.iter().map(|&i| s.z.col(i).to_vec()).collect();
    Ok((vals, DenseMatrix::from_columns(n, &cols)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn diagonal_spectrum() {
        let b = DenseMatrix::diagonal(&[c64(3.0, 0.0), c64(2.0, 0.0)]);
        let e = dense_eig(&b).unwrap();
        assert_eq!(e.values, vec![c64(2.0, 0.0), c64(3.0, 0.0)]);
        assert!(e.residuals.iter().all(|&r| r < 1e-15));
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let b = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let e = dense_eig(&b).unwrap();
        let mut ims: Vec<f64> = e.values.iter().map(|v| v.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        assert!(e.values.iter().all(|v| v.re.abs() < 1e-14));
        assert!(e.residuals.iter().all(|&r| r < 1e-14));
    }

    #[test]
    fn jordan_block_converges() {
        let b = DenseMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let e = dense_eig(&b).unwrap();
        assert!(e.converged());
        assert!(e.values.iter().all(|v| (v - c64(1.0, 0.0)).norm() < 1e-7));
    }

    #[test]
    fn hermitian_vectors_orthonormal() {
        let g = DenseMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]);
        let (vals, vecs) = hermitian_eig(&g).unwrap();
        let expected = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-13);
        }
        let gram = vecs.adjoint().matmul(&vecs);
        assert!(gram.sub(&DenseMatrix::identity(3)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn empty_matrix() {
        let e = dense_eig(&DenseMatrix::zeros(0, 0)).unwrap();
        assert!(e.is_empty());
    }
}
