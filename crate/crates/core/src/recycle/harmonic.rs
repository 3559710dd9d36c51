use std::cmp::Ordering;

use crate::dense::{by_modulus, dense_eig, thin_qr, DenseMatrix, EigenPairs, Lu};
use crate::error::{Error, Result};
use crate::C64;

/// Condition estimate above which the square part of `Hbar` counts as singular.
pub const HARMONIC_COND_LIMIT: f64 = 1e14;

/// Which part of the harmonic spectrum to keep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Which {
    SmallestModulus,
    LargestModulus,
    NearestTarget(C64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicSpec {
    pub k: usize,
    pub which: Which,
}

impl HarmonicSpec {
    pub fn new(k: usize, which: Which) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("harmonic selection needs k >= 1"));
        }
        Ok(Self { k, which })
    }

    pub fn smallest(k: usize) -> Result<Self> {
        Self::new(k, Which::SmallestModulus)
    }
}

/// Selected harmonic Ritz pairs in coordinates of the cycle basis.
#[derive(Clone, Debug)]
pub struct HarmonicRitz {
    /// Unit-norm columns `p_j`.
    pub p: DenseMatrix,
    pub theta: Vec<C64>,
}

impl HarmonicRitz {
    pub fn k(&self) -> usize {
        self.theta.len()
    }
}

/// Harmonic Ritz pairs of a cycle with `(l+1) x l` matrix `hbar`.
///
/// Solves `(H + H^{-H} r^H r) p = theta p` where `H` is the leading square
/// block and `r` the last row; for an Arnoldi cycle `r = h_{l+1,l} e_l^T`.
pub fn harmonic_ritz(hbar: &DenseMatrix, spec: &HarmonicSpec) -> Result<HarmonicRitz> {
    let l = hbar.cols();
    if l == 0 || hbar.rows() != l + 1 {
        return Err(Error::invalid(format!(
            "harmonic Ritz needs an (l+1) x l matrix, got {} x {}",
            hbar.rows(),
            hbar.cols()
        )));
    }
    if spec.k > l {
        return Err(Error::HarvestTooSmall { needed: spec.k, available: l });
    }
    let h = hbar.block(0, l, 0, l);
    check_conditioning(&h, "square part of Hbar")?;
    let row: Vec<C64> = (0..l).map(|j| hbar[(l, j)]).collect();
    let rhs: Vec<C64> = row.iter().map(|v| v.conj()).collect();
    let f = Lu::factor(&h.adjoint())
        .map_err(|_| Error::HarmonicBreakdown("square part of Hbar is singular".into()))?
        .solve_vec(&rhs);
    let mut b = h;
    for j in 0..l {
        for i in 0..l {
            b[(i, j)] += f[i] * row[j];
        }
    }
    let pairs = dense_eig(&b)?;
    Ok(select(&pairs, spec, is_real(hbar)))
}

/// Harmonic Ritz pairs of the generalized problem `G^H G p = theta G^H S p`.
///
/// `S` is the coupling between the residual basis and the search basis;
/// `S = [I; 0]` recovers [`harmonic_ritz`].
pub fn harmonic_ritz_generalized(g: &DenseMatrix, s: &DenseMatrix, spec: &HarmonicSpec) -> Result<HarmonicRitz> {
    let l = g.cols();
    if s.rows() != g.rows() || s.cols() != l || l == 0 {
        return Err(Error::invalid("generalized harmonic problem needs matching G and S"));
    }
    if spec.k > l {
        return Err(Error::HarvestTooSmall { needed: spec.k, available: l });
    }
    let gh = g.adjoint();
    let lhs = gh.matmul(g);
    let rhs = gh.matmul(s);
    check_conditioning(&rhs, "G^H S")?;
    let lu = Lu::factor(&rhs).map_err(|_| Error::HarmonicBreakdown("G^H S is singular".into()))?;
    let b = lu.solve(&lhs);
    let pairs = dense_eig(&b)?;
    Ok(select(&pairs, spec, is_real(g) && is_real(s)))
}

fn check_conditioning(h: &DenseMatrix, what: &str) -> Result<()> {
    let qr = thin_qr(h)?;
    let diag: Vec<f64> = (0..h.cols()).map(|i| qr.r[(i, i)].re).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || max / min > HARMONIC_COND_LIMIT {
        return Err(Error::HarmonicBreakdown(format!("{what} has condition estimate {:.3e}", max / min)));
    }
    Ok(())
}

fn is_real(m: &DenseMatrix) -> bool {
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    m.as_slice().iter().all(|v| v.im.abs() <= 1e-15 * scale)
}

fn order(which: Which) -> impl Fn(&C64, &C64) -> Ordering {
    move |a, b| match which {
        Which::SmallestModulus => by_modulus(a, b),
        Which::LargestModulus => by_modulus(b, a),
        Which::NearestTarget(t) => (a - t)
            .norm()
            .total_cmp(&(b - t).norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im)),
    }
}

fn select(pairs: &EigenPairs, spec: &HarmonicSpec, real_problem: bool) -> HarmonicRitz {
    let cmp = order(spec.which);
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.sort_by(|&i, &j| cmp(&pairs.values[i], &pairs.values[j]));
    let mut chosen: Vec<usize> = idx[..spec.k].to_vec();
    if real_problem {
        let rest: Vec<usize> = idx[spec.k..].to_vec();
        for &i in chosen.clone().iter() {
            let t = pairs.values[i];
            if t.im.abs() <= 1e-10 * t.norm().max(f64::MIN_POSITIVE) {
                continue;
            }
            let tol = 1e-8 * t.norm();
            let has_partner = chosen.iter().any(|&j| j != i && (pairs.values[j] - t.conj()).norm() <= tol);
            if has_partner {
                continue;
            }
            if let Some(&j) = rest
                .iter()
                .filter(|&&j| !chosen.contains(&j))
                .find(|&&j| (pairs.values[j] - t.conj()).norm() <= tol)
            {
                chosen.push(j);
            }
        }
    }
    let sel = pairs.permuted(&chosen);
    HarmonicRitz { p: sel.vectors, theta: sel.values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::dense::hermitian_eig;

    fn re(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c64(x, 0.0)).collect()
    }

    #[test]
    fn zero_subdiagonal_gives_plain_eigenvalues() {
        let mut hbar = DenseMatrix::zeros(4, 3);
        hbar.set_block(0, 0, &DenseMatrix::diagonal(&re(&[3.0, 1.0, 2.0])));
        let hr = harmonic_ritz(&hbar, &HarmonicSpec::smallest(3).unwrap()).unwrap();
        let vals: Vec<f64> = hr.theta.iter().map(|t| t.re).collect();
        for (a, b) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn selects_largest_and_target() {
        let mut hbar = DenseMatrix::zeros(4, 3);
        hbar.set_block(0, 0, &DenseMatrix::diagonal(&re(&[3.0, 1.0, 2.0])));
        let hr = harmonic_ritz(&hbar, &HarmonicSpec::new(1, Which::LargestModulus).unwrap()).unwrap();
        assert!((hr.theta[0].re - 3.0).abs() < 1e-12);
        let hr = harmonic_ritz(&hbar, &HarmonicSpec::new(1, Which::NearestTarget(c64(2.2, 0.0))).unwrap()).unwrap();
        assert!((hr.theta[0].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_pair_kept_together() {
        // rotation block with eigenvalues 1 +- i, plus 5
        let h = DenseMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[-1.0, 1.0, 0.0], &[0.0, 0.0, 5.0], &[0.0, 0.0, 0.0]]);
        let hr = harmonic_ritz(&h, &HarmonicSpec::smallest(1).unwrap()).unwrap();
        assert_eq!(hr.k(), 2);
        assert!((hr.theta[0] - hr.theta[1].conj()).norm() < 1e-10);
    }

    #[test]
    fn singular_square_part_is_breakdown() {
        let h = DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(harmonic_ritz(&h, &HarmonicSpec::smallest(1).unwrap()), Err(Error::HarmonicBreakdown(_))));
    }

    #[test]
    fn generalized_with_identity_coupling_matches() {
        let h = DenseMatrix::from_real_rows(&[&[2.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.0, 0.7, 4.0], &[0.0, 0.0, 0.3]]);
        let spec = HarmonicSpec::smallest(3).unwrap();
        let a = harmonic_ritz(&h, &spec).unwrap();
        let mut s = DenseMatrix::zeros(4, 3);
        s.set_block(0, 0, &DenseMatrix::identity(3));
        let b = harmonic_ritz_generalized(&h, &s, &spec).unwrap();
        for (x, y) in a.theta.iter().zip(&b.theta) {
            assert!((x - y).norm() < 1e-10);
        }
        // real symmetric Hbar^H Hbar is positive definite, so all theta nonzero
        let (w, _) = hermitian_eig(&h.adjoint().matmul(&h)).unwrap();
        assert!(w[0] > 0.0);
    }
}
