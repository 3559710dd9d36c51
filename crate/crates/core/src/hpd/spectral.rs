use crate::dense::{dense_eig, hermitian_eig, DenseMatrix, DENSE_EIG_CAP};
use crate::error::{Error, Result};
use crate::operators::{FnOperator, LinearOperator, Preconditioner};
use crate::random;
use crate::vector::{self, Vector};
use crate::C64;

use super::basis::AugBasis;
use super::ritz::lanczos_extremes;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralKind {
    /// `I + W (nu (W^H A W)^{-1} - I) W^H`
    Mdef,
    /// `I + nu W (W^H A W)^{-1} W^H`
    Mcoarse,
}

/// Two-level preconditioner built from (approximate) eigenvectors `W`.
#[derive(Clone, Debug)]
pub struct SpectralPreconditioner {
    kind: SpectralKind,
    basis: AugBasis,
    nu: f64,
}

impl SpectralPreconditioner {
    pub fn kind(&self) -> SpectralKind {
        self.kind
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    fn action(&self, v: &[C64]) -> Vector {
        let wv = vector::adjoint_times(&self.basis.w, v);
        let ginv = self.basis.solve(&wv);
        let coeffs: Vec<C64> = match self.kind {
            SpectralKind::Mdef => ginv.iter().zip(&wv).map(|(g, w)| g * self.nu - w).collect(),
            SpectralKind::Mcoarse => ginv.iter().map(|g| g * self.nu).collect(),
        };
        vector::add(v, &vector::combine(v.len(), &self.basis.w, &coeffs))
    }
}

impl Preconditioner for SpectralPreconditioner {
    fn dim(&self) -> usize {
        self.basis.aw.first().map_or(0, Vec::len)
    }

    fn apply(&mut self, v: &[C64]) -> Vector {
        self.action(v)
    }
}

pub fn build_spectral_preconditioner(kind: SpectralKind, basis: &AugBasis, nu: f64) -> Result<SpectralPreconditioner> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    if basis.k() == 0 {
        return Err(Error::invalid("spectral preconditioner needs at least one basis vector"));
    }
    Ok(SpectralPreconditioner { kind, basis: basis.clone(), nu })
}

/// Estimate of `lambda_{k+1}`: smallest Ritz value of a short Lanczos run on
/// `P6^H A`, started inside its range.
pub fn default_nu(a: &dyn LinearOperator, basis: &AugBasis, steps: usize, seed: u64) -> Result<f64> {
    let n = a.dim();
    let op = FnOperator::new(n, |x: &[C64]| basis.p6_adjoint(&a.apply(x))).hermitian(true);
    let mut rng = random::seeded(seed);
    let start = op.apply(&random::real_vector(&mut rng, n));
    let steps = steps.min(n.saturating_sub(basis.k())).max(1);
    let (lo, _) = lanczos_extremes(&op, &start, steps)?;
    if !(lo > 0.0) {
        return Err(Error::Degenerate("Lanczos estimate of lambda_{k+1} is not positive".into()));
    }
    Ok(lo)
}

/// Real parts of the eigenvalues of `M A`, ascending (dense diagnostic).
pub fn preconditioned_spectrum(a: &dyn LinearOperator, m: &mut dyn Preconditioner) -> Result<Vec<f64>> {
    let n = a.dim();
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_EIG_CAP });
    }
    let cols: Vec<Vector> = (0..n).map(|j| m.apply(&a.apply(&vector::unit(n, j)))).collect();
    let d = DenseMatrix::from_columns(n, &cols);
    let mut vals: Vec<f64> = dense_eig(&d)?.values.iter().map(|v| v.re).collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Whether `lambda_{k+1} <= lambda_min + nu <= lambda_k + nu <= lambda_max`
/// holds for the ascending spectrum `eigs` of `A`.
pub fn coarse_condition_holds(eigs: &[f64], k: usize, nu: f64) -> bool {
    if k == 0 || k >= eigs.len() {
        return false;
    }
    let (lmin, lmax) = (eigs[0], eigs[eigs.len() - 1]);
    eigs[k] <= lmin + nu && lmin + nu <= eigs[k - 1] + nu && eigs[k - 1] + nu <= lmax
}

/// Ascending eigenvalues of a Hermitian operator (dense diagnostic).
pub fn hermitian_spectrum(a: &dyn LinearOperator) -> Result<Vec<f64>> {
    let n = a.dim();
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_EIG_CAP });
    }
    let d = a.to_dense();
    let h = d.add(&d.adjoint()).scaled(C64::new(0.5, 0.0));
    Ok(hermitian_eig(&h)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::CsrMatrix;
    use crate::vector::{from_real, unit};

    fn spectrum(kind: SpectralKind, nu: f64) -> Vec<f64> {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0, 4.0]));
        let basis = AugBasis::new(&a, vec![unit(4, 0)]).unwrap();
        let mut m = build_spectral_preconditioner(kind, &basis, nu).unwrap();
        preconditioned_spectrum(&a, &mut m).unwrap()
    }

    #[test]
    fn mdef_moves_to_nu() {
        for (got, want) in spectrum(SpectralKind::Mdef, 2.0).iter().zip([2.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn mcoarse_shifts_by_nu() {
        for (got, want) in spectrum(SpectralKind::Mcoarse, 1.0).iter().zip([2.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_nu() {
        let a = CsrMatrix::identity(3);
        let basis = AugBasis::new(&a, vec![unit(3, 0)]).unwrap();
        assert!(build_spectral_preconditioner(SpectralKind::Mdef, &basis, 0.0).is_err());
    }

    #[test]
    fn nu_estimate_near_next_eigenvalue() {
        let a = CsrMatrix::from_diagonal(&from_real(&(1..=30).map(f64::from).collect::<Vec<_>>()));
        let basis = AugBasis::new(&a, vec![unit(30, 0), unit(30, 1)]).unwrap();
        let nu = default_nu(&a, &basis, 28, 42).unwrap();
        assert!((nu - 3.0).abs() < 1e-6, "nu = {nu}");
    }

    #[test]
    fn coarse_condition() {
        let eigs = [1.0, 2.0, 3.0, 4.0];
        assert!(coarse_condition_holds(&eigs, 1, 1.0));
        assert!(!coarse_condition_holds(&eigs, 1, 5.0));
    }
}
