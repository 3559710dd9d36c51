//! Dense operators with prescribed spectra for tests and examples.

use super::LinearOperator;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::random::{self, SeededRng};
use crate::vector::Vector;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mixing {
    /// `diag(lambda)` as is.
    None,
    /// `Q diag(lambda) Q^H` with a seeded Haar unitary `Q`.
    Unitary { seed: u64 },
    /// As `Unitary` with a real orthogonal `Q`.
    Orthogonal { seed: u64 },
    /// `S diag(lambda) S^{-1}` with `S = U diag(sigma) V^H`, singular values
    /// spread geometrically over `[1, cond]`.
    Similarity { seed: u64, cond: f64 },
    /// `Q T Q^H` with `T = diag(lambda) + coupling * N / sqrt(n)`, `N` strictly
    /// upper Gaussian restricted to the trailing `n - decoupled` indices, and
    /// `Q` real orthogonal. Non-normal for `coupling > 0`.
    Schur { seed: u64, coupling: f64, decoupled: usize },
}

#[derive(Clone, Debug)]
pub struct SpectrumSpec {
    pub eigenvalues: Vec<C64>,
    pub mixing: Mixing,
}

impl SpectrumSpec {
    pub fn new(eigenvalues: Vec<C64>, mixing: Mixing) -> Self {
        Self { eigenvalues, mixing }
    }

    pub fn real(eigenvalues: &[f64], mixing: Mixing) -> Self {
        Self::new(eigenvalues.iter().map(|&v| C64::new(v, 0.0)).collect(), mixing)
    }

    /// `outliers` followed by `n - outliers.len()` points evenly spaced over `[lo, hi]`.
    pub fn clustered(n: usize, outliers: &[f64], lo: f64, hi: f64, mixing: Mixing) -> Self {
        let bulk = n - outliers.len();
        let mut ev: Vec<f64> = outliers.to_vec();
        ev.extend((0..bulk).map(|i| if bulk == 1 { lo } else { lo + (hi - lo) * i as f64 / (bulk - 1) as f64 }));
        Self::real(&ev, mixing)
    }
}

/// Explicit operator together with its eigen-decomposition.
#[derive(Clone, Debug)]
pub struct TestOperator {
    pub matrix: DenseMatrix,
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors as columns.
    pub right: DenseMatrix,
    /// Left eigenvectors as columns, scaled so that `left^H right = I`.
    pub left: DenseMatrix,
    hermitian: bool,
    // Schur factors (Q, T) when available; used for a stable exact solve.
    schur: Option<(DenseMatrix, DenseMatrix)>,
}

impl TestOperator {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Right eigenvectors for the given eigenvalue indices.
    pub fn right_vectors(&self, idx: &[usize]) -> Vec<Vector> {
        idx.iter().map(|&i| self.right.col(i).to_vec()).collect()
    }

    pub fn left_vectors(&self, idx: &[usize]) -> Vec<Vector> {
        idx.iter().map(|&i| self.left.col(i).to_vec()).collect()
    }

    /// Exact solution of `A x = b` through the eigendecomposition.
    pub fn solve(&self, b: &[C64]) -> Vector {
        if let Some((q, t)) = &self.schur {
            let mut y = q.adjoint_mul_vec(b);
            let n = y.len();
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= t[(i, j)] * y[j];
                }
                y[i] = s / t[(i, i)];
            }
            return q.mul_vec(&y);
        }
        let coeffs = self.left.adjoint_mul_vec(b);
        let scaled: Vec<C64> = coeffs.iter().zip(&self.eigenvalues).map(|(c, l)| c / l).collect();
        self.right.mul_vec(&scaled)
    }
}

impl LinearOperator for TestOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &[C64]) -> Vector {
        self.matrix.mul_vec(x)
    }

    fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    fn to_dense(&self) -> DenseMatrix {
        self.matrix.clone()
    }
}

pub fn make_test_operator(spec: &SpectrumSpec) -> Result<TestOperator> {
    let n = spec.eigenvalues.len();
    if n == 0 {
        return Err(Error::invalid("spectrum must be nonempty"));
    }
    if let Some(i) = spec.eigenvalues.iter().position(|l| l.norm() == 0.0) {
        return Err(Error::SingularOperator(format!("eigenvalue {i} is zero")));
    }
    if spec.eigenvalues.iter().any(|l| !(l.re.is_finite() && l.im.is_finite())) {
        return Err(Error::invalid("eigenvalues must be finite"));
    }
    let real_spectrum = spec.eigenvalues.iter().all(|l| l.im == 0.0);
    let d = DenseMatrix::diagonal(&spec.eigenvalues);
    if let Mixing::Schur { seed, coupling, decoupled } = spec.mixing {
        if !(coupling >= 0.0 && coupling.is_finite()) || decoupled > n {
            return Err(Error::invalid("schur mixing needs finite coupling >= 0 and decoupled <= n"));
        }
        return Ok(schur_operator(&spec.eigenvalues, seed, coupling, decoupled));
    }
    let (right, left) = match spec.mixing {
        Mixing::None => (DenseMatrix::identity(n), DenseMatrix::identity(n)),
        Mixing::Unitary { seed } => {
            let q = random::unitary(&mut random::seeded(seed), n, false);
            (q.clone(), q)
        }
        Mixing::Orthogonal { seed } => {
            let q = random::unitary(&mut random::seeded(seed), n, true);
            (q.clone(), q)
        }
        Mixing::Similarity { seed, cond } => {
            if !(cond >= 1.0) {
                return Err(Error::invalid("similarity condition number must be >= 1"));
            }
            similarity(&mut random::seeded(seed), n, cond)
        }
        Mixing::Schur { .. } => unreachable!(),
    };
    let matrix = right.matmul(&d).matmul(&left.adjoint());
    let unitary_mix = !matches!(spec.mixing, Mixing::Similarity { .. });
    let hermitian = real_spectrum && unitary_mix;
    let matrix = if hermitian { matrix.add(&matrix.adjoint()).scaled(C64::new(0.5, 0.0)) } else { matrix };
    Ok(TestOperator { matrix, eigenvalues: spec.eigenvalues.clone(), right, left, hermitian, schur: None })
}

fn schur_operator(lambda: &[C64], seed: u64, coupling: f64, decoupled: usize) -> TestOperator {
    let n = lambda.len();
    let mut rng = random::seeded(seed);
    let q = random::unitary(&mut rng, n, true);
    let g = random::real_matrix(&mut rng, n, n);
    let scale = coupling / (n as f64).sqrt();
    let mut t = DenseMatrix::diagonal(lambda);
    for j in decoupled..n {
        for i in decoupled..j {
            t[(i, j)] = g[(i, j)] * scale;
        }
    }
    let matrix = q.matmul(&t).matmul(&q.adjoint());
    let (x, y) = triangular_eigenvectors(&t);
    let right = q.matmul(&x);
    let left = q.matmul(&y);
    let hermitian = coupling == 0.0 && lambda.iter().all(|l| l.im == 0.0);
    TestOperator { matrix, eigenvalues: lambda.to_vec(), right, left, hermitian, schur: Some((q, t)) }
}

// Right eigenvectors by back substitution, left ones by forward substitution
// on T^H, both kept unit-norm (rescaling on the fly against overflow), then
// the left ones scaled so that y_j^H x_j = 1. Exact ties in the diagonal give
// a zero component.
fn triangular_eigenvectors(t: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = t.rows();
    let zero = C64::new(0.0, 0.0);
    let solve = |denom: C64, s: C64| if denom.norm() == 0.0 { zero } else { s / denom };
    let mut x = DenseMatrix::zeros(n, n);
    let mut y = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let lk = t[(k, k)];
        let mut v = vec![zero; n];
        v[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = zero;
            for j in i + 1..=k {
                s += t[(i, j)] * v[j];
            }
            v[i] = solve(lk - t[(i, i)], s);
            rescale(&mut v[i..=k]);
        }
        let mut w = vec![zero; n];
        w[k] = C64::new(1.0, 0.0);
        for i in k + 1..n {
            let mut s = zero;
            for j in k..i {
                s += t[(j, i)].conj() * w[j];
            }
            w[i] = solve(lk.conj() - t[(i, i)].conj(), s);
            rescale(&mut w[k..=i]);
        }
        normalize(&mut v);
        normalize(&mut w);
        let d: C64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let f = C64::new(1.0, 0.0) / d.conj();
        x.col_mut(k).copy_from_slice(&v);
        for (dst, src) in y.col_mut(k).iter_mut().zip(&w) {
            *dst = src * f;
        }
    }
    (x, y)
}

fn rescale(v: &mut [C64]) {
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m > 1e100 {
        v.iter_mut().for_each(|z| *z /= m);
    }
}

fn normalize(v: &mut [C64]) {
    rescale(v);
    let m = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= m);
}

// S = U diag(sigma) V^H, S^{-1} = V diag(1/sigma) U^H; left vectors are the
// columns of S^{-H} = U diag(1/sigma) V^H.
fn similarity(rng: &mut SeededRng, n: usize, cond: f64) -> (DenseMatrix, DenseMatrix) {
    let u = random::unitary(rng, n, false);
    let v = random::unitary(rng, n, false);
    let sig: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 1.0 } else { cond.powf(i as f64 / (n - 1) as f64) })
        .collect();
    let s = u.matmul(&DenseMatrix::diagonal(&sig.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())).matmul(&v.adjoint());
    let s_inv_h = u
        .matmul(&DenseMatrix::diagonal(&sig.iter().map(|&x| C64::new(1.0 / x, 0.0)).collect::<Vec<_>>()))
        .matmul(&v.adjoint());
    (s, s_inv_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn unmixed_is_diagonal() {
        let op = make_test_operator(&SpectrumSpec::real(&[1.0, 2.0, 3.0], Mixing::None)).unwrap();
        assert_eq!(op.matrix, DenseMatrix::diagonal(&[c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)]));
        assert!(op.is_hermitian());
    }

    #[test]
    fn zero_eigenvalue_rejected() {
        let err = make_test_operator(&SpectrumSpec::real(&[1.0, 0.0], Mixing::None));
        assert!(matches!(err, Err(Error::SingularOperator(_))));
    }

    #[test]
    fn left_right_biorthogonal() {
        let op = make_test_operator(&SpectrumSpec::real(&[1.0, 2.0, 5.0, 7.0], Mixing::Similarity { seed: 3, cond: 10.0 })).unwrap();
        let g = op.left.adjoint().matmul(&op.right);
        assert!(g.sub(&DenseMatrix::identity(4)).frobenius_norm() < 1e-12);
        assert!(!op.is_hermitian());
    }

    #[test]
    fn schur_mixing_keeps_outliers_and_eigenvectors() {
        let spec = SpectrumSpec::clustered(40, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Schur { seed: 4, coupling: 2.0, decoupled: 2 });
        let op = make_test_operator(&spec).unwrap();
        assert!(!op.is_hermitian());
        let eig = crate::dense::dense_eig(&op.matrix).unwrap();
        let mut small: Vec<f64> = eig.values.iter().filter(|l| l.norm() < 0.5).map(|l| l.re).collect();
        small.sort_by(f64::total_cmp);
        assert_eq!(small.len(), 2);
        assert!((small[0] - 1e-3).abs() < 1e-10 && (small[1] - 2e-3).abs() < 1e-10);
        for k in [0, 1, 5, 39] {
            let x = op.right.col(k);
            let ax = op.matrix.mul_vec(x);
            let res: f64 = ax.iter().zip(x).map(|(a, b)| (a - op.eigenvalues[k] * b).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-10, "right residual {res}");
            let y = op.left.col(k);
            let d: C64 = y.iter().zip(x).map(|(a, b)| a.conj() * b).sum();
            assert!((d - 1.0).norm() < 1e-8);
        }
        let b: Vec<C64> = (0..40).map(|i| c64(1.0, i as f64)).collect();
        let x = op.solve(&b);
        let r: f64 = op.matrix.mul_vec(&x).iter().zip(&b).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(r < 1e-10 * 40.0);
    }

    #[test]
    fn zero_coupling_schur_is_normal() {
        let spec = SpectrumSpec::real(&[1.0, 2.0, 3.0], Mixing::Schur { seed: 1, coupling: 0.0, decoupled: 0 });
        let op = make_test_operator(&spec).unwrap();
        assert!(op.is_hermitian());
        let g = op.left.adjoint().matmul(&op.right);
        assert!(g.sub(&DenseMatrix::identity(3)).frobenius_norm() < 1e-12);
    }
}
