//! Deflated minimum-residual solvers for non-Hermitian systems.
//!
//! Every product involving `W^H A^H` goes through the cached block `A W`, so
//! matrix-free operators never need an adjoint.

mod translate;

pub use translate::{spectral_translation, translation_vector, TranslatedOperator};

use crate::dense::{hessenberg_lsq, thin_qr, solve_upper, Cholesky, DenseMatrix, Lu};
use crate::error::{check_len, Error, Result};
use crate::gmres::{arnoldi_expand, fgmres_solve, restarted_fgmres, ArnoldiState, SolveConfig, SolveReport, StepOutcome};
use crate::operators::{apply_all, FnOperator, Identity, LinearOperator, Preconditioner};
use crate::vector::{self, Vector};
use crate::C64;

fn check_basis(n: usize, w: &[Vector]) -> Result<()> {
    if w.len() >= n {
        return Err(Error::invalid(format!("deflation basis has {} columns for n = {n}", w.len())));
    }
    for col in w {
        check_len(n, col.len())?;
        if !vector::is_finite(col) {
            return Err(Error::NonFinite("deflation basis"));
        }
    }
    Ok(())
}

fn gram(x: &[Vector], y: &[Vector]) -> DenseMatrix {
    DenseMatrix::from_fn(x.len(), y.len(), |i, j| vector::dot(&x[i], &y[j]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthoProjector {
    Q1,
    P1,
    P2,
}

/// Orthogonal deflation data: `W`, `A W` and the Cholesky factor of `(AW)^H AW`.
pub struct OrthoDeflation<'a> {
    a: &'a dyn LinearOperator,
    pub w: Vec<Vector>,
    pub aw: Vec<Vector>,
    g: Cholesky,
}

impl<'a> OrthoDeflation<'a> {
    pub fn new(a: &'a dyn LinearOperator, w: Vec<Vector>) -> Result<Self> {
        check_basis(a.dim(), &w)?;
        let aw = apply_all(a, &w);
        let g = Cholesky::factor(&gram(&aw, &aw))?;
        Ok(Self { a, w, aw, g })
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    /// `(AW^H AW)^{-1} (AW)^H x`
    fn coords(&self, x: &[C64]) -> Vector {
        self.g.solve_vec(&vector::adjoint_times(&self.aw, x))
    }

    pub fn q1(&self, x: &[C64]) -> Vector {
        vector::combine(x.len(), &self.aw, &self.coords(x))
    }

    pub fn p1(&self, x: &[C64]) -> Vector {
        vector::sub(x, &self.q1(x))
    }

    pub fn p2(&self, x: &[C64]) -> Vector {
        let c = self.coords(&self.a.apply(x));
        vector::sub(x, &vector::combine(x.len(), &self.w, &c))
    }

    pub fn apply(&self, which: OrthoProjector, x: &[C64]) -> Vector {
        match which {
            OrthoProjector::Q1 => self.q1(x),
            OrthoProjector::P1 => self.p1(x),
            OrthoProjector::P2 => self.p2(x),
        }
    }

    /// `W (AW^H AW)^{-1} (AW)^H b`, the component recovered outside the Krylov solve.
    pub fn coarse_component(&self, b: &[C64]) -> Vector {
        vector::combine(b.len(), &self.w, &self.coords(b))
    }
}

/// Oblique deflation data: `W`, `W~`, `A W` and the LU factors of `E = W~^H A W`.
pub struct ObliqueDeflation<'a> {
    a: &'a dyn LinearOperator,
    pub w: Vec<Vector>,
    pub wt: Vec<Vector>,
    pub aw: Vec<Vector>,
    e: Lu,
}

impl<'a> ObliqueDeflation<'a> {
    pub fn new(a: &'a dyn LinearOperator, w: Vec<Vector>, wt: Vec<Vector>) -> Result<Self> {
        check_basis(a.dim(), &w)?;
        check_basis(a.dim(), &wt)?;
        if w.len() != wt.len() {
            return Err(Error::invalid("W and W~ must have the same number of columns"));
        }
        let aw = apply_all(a, &w);
        let e = gram(&wt, &aw);
        if w.len() > 0 {
            let qr = thin_qr(&e)?;
            let diag: Vec<f64> = (0..e.cols()).map(|i| qr.r[(i, i)].re).collect();
            let max = diag.iter().cloned().fold(0.0, f64::max);
            let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(min > 1e-13 * max) {
                return Err(Error::SingularOperator("W~^H A W is singular".into()));
            }
        }
        let e = Lu::factor(&e).map_err(|_| Error::SingularOperator("W~^H A W is singular".into()))?;
        Ok(Self { a, w, wt, aw, e })
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    /// `E^{-1} W~^H x`
    fn coords(&self, x: &[C64]) -> Vector {
        self.e.solve_vec(&vector::adjoint_times(&self.wt, x))
    }

    /// Projection onto `range(AW)` along the orthogonal complement of `W~`.
    pub fn q2(&self, x: &[C64]) -> Vector {
        vector::combine(x.len(), &self.aw, &self.coords(x))
    }

    pub fn p3(&self, x: &[C64]) -> Vector {
        vector::sub(x, &self.q2(x))
    }

    /// `P3 A P3 x`
    pub fn deflated_apply(&self, x: &[C64]) -> Vector {
        self.p3(&self.a.apply(&self.p3(x)))
    }

    /// `x + W E^{-1} W~^H (b - A x)`, which annihilates `W~^H r`.
    pub fn correct(&self, x: &[C64], b: &[C64]) -> Vector {
        let r = vector::sub(b, &self.a.apply(x));
        vector::add(x, &vector::combine(x.len(), &self.w, &self.coords(&r)))
    }
}

/// `Q3 = W (W^H A^H A W)^{-1} W^H`, `P4 = I - Q3 A^H A`, `P5 = I - A Q3 A^H`.
pub struct EquivalenceProjectors<'a> {
    a: &'a dyn LinearOperator,
    pub w: Vec<Vector>,
    pub aw: Vec<Vector>,
    g: Cholesky,
}

impl<'a> EquivalenceProjectors<'a> {
    pub fn new(a: &'a dyn LinearOperator, w: Vec<Vector>) -> Result<Self> {
        check_basis(a.dim(), &w)?;
        let aw = apply_all(a, &w);
        let g = Cholesky::factor(&gram(&aw, &aw))?;
        Ok(Self { a, w, aw, g })
    }

    pub fn q3(&self, x: &[C64]) -> Vector {
        let c = self.g.solve_vec(&vector::adjoint_times(&self.w, x));
        vector::combine(x.len(), &self.w, &c)
    }

    pub fn p4(&self, x: &[C64]) -> Vector {
        let c = self.g.solve_vec(&vector::adjoint_times(&self.aw, &self.a.apply(x)));
        vector::sub(x, &vector::combine(x.len(), &self.w, &c))
    }

    pub fn p5(&self, x: &[C64]) -> Vector {
        let c = self.g.solve_vec(&vector::adjoint_times(&self.aw, x));
        vector::sub(x, &vector::combine(x.len(), &self.aw, &c))
    }

    /// `Q3 A^H b`
    pub fn q3_adjoint(&self, b: &[C64]) -> Vector {
        let c = self.g.solve_vec(&vector::adjoint_times(&self.aw, b));
        vector::combine(b.len(), &self.w, &c)
    }
}

/// Deflated solve plus the checks that tie its residual to the inner solve.
#[derive(Clone, Debug)]
pub struct DeflatedSolve {
    pub report: SolveReport,
    /// `||(b - A x) - r_inner|| / ||b||` for the reconstructed solution.
    pub residual_identity: f64,
    /// Largest component of an inner basis vector outside the admissible subspace.
    pub basis_leak: f64,
}

fn last_basis(report: &SolveReport) -> &[Vector] {
    report.last_cycle.as_ref().map_or(&[], |c| &c.state.v)
}

fn finish(mut report: SolveReport, a: &dyn LinearOperator, b: &[C64], x: Vector, tol: f64) -> (SolveReport, Vector) {
    let r = vector::sub(b, &a.apply(&x));
    let bnorm = vector::norm(b);
    report.final_relres = if bnorm > 0.0 { vector::norm(&r) / bnorm } else { 0.0 };
    report.converged = report.final_relres <= tol;
    report.solution = x;
    (report, r)
}

/// GMRES on `P1 A x = P1 b` followed by `x = W (AW^H AW)^{-1} (AW)^H b + P2 x^`.
pub fn deflated_gmres_ortho(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    w: &[Vector],
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
) -> Result<DeflatedSolve> {
    if w.is_empty() {
        let report = fgmres_solve(a, m, b, x0, config)?;
        return Ok(DeflatedSolve { report, residual_identity: 0.0, basis_leak: 0.0 });
    }
    let n = a.dim();
    check_len(n, b.len())?;
    let d = OrthoDeflation::new(a, w.to_vec())?;
    let op = FnOperator::new(n, |x: &[C64]| d.p1(&a.apply(x)));
    let pb = d.p1(b);
    let inner = restarted_fgmres(&op, m, &pb, x0, config, vector::norm(b))?;
    let xhat = inner.solution.clone();
    let x = vector::add(&d.coarse_component(b), &d.p2(&xhat));
    let rhat = d.p1(&vector::sub(b, &a.apply(&xhat)));
    let aw_norm = vector::frobenius(&d.aw).max(f64::MIN_POSITIVE);
    let basis_leak = last_basis(&inner)
        .iter()
        .map(|v| vector::norm(&vector::adjoint_times(&d.aw, v)) / aw_norm)
        .fold(0.0, f64::max);
    let (report, r) = finish(inner, a, b, x, config.tol);
    let bnorm = vector::norm(b).max(f64::MIN_POSITIVE);
    Ok(DeflatedSolve { report, residual_identity: vector::norm(&vector::sub(&r, &rhat)) / bnorm, basis_leak })
}

/// GMRES on `P3 A P3 t = P3 r0`, then
/// `x = x0 + P3 t + W E^{-1} W~^H (b - A (x0 + P3 t))`.
pub fn deflated_gmres_oblique(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    w: &[Vector],
    wt: &[Vector],
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
) -> Result<DeflatedSolve> {
    let n = a.dim();
    check_len(n, b.len())?;
    let d = ObliqueDeflation::new(a, w.to_vec(), wt.to_vec())?;
    let x0 = match x0 {
        Some(x0) => {
            check_len(n, x0.len())?;
            x0.to_vec()
        }
        None => vector::zeros(n),
    };
    let r0 = vector::sub(b, &a.apply(&x0));
    let op = FnOperator::new(n, |x: &[C64]| d.deflated_apply(x));
    let rhs = d.p3(&r0);
    let inner = restarted_fgmres(&op, m, &rhs, None, config, vector::norm(b))?;
    let pt = d.p3(&inner.solution);
    let r_inner = vector::sub(&rhs, &op.apply(&inner.solution));
    let x = d.correct(&vector::add(&x0, &pt), b);
    let wt_norm = vector::frobenius(&d.wt).max(f64::MIN_POSITIVE);
    let basis_leak = last_basis(&inner)
        .iter()
        .map(|v| vector::norm(&vector::adjoint_times(&d.wt, v)) / wt_norm)
        .fold(0.0, f64::max);
    let (report, r) = finish(inner, a, b, x, config.tol);
    let bnorm = vector::norm(b).max(f64::MIN_POSITIVE);
    Ok(DeflatedSolve { report, residual_identity: vector::norm(&vector::sub(&r, &r_inner)) / bnorm, basis_leak })
}

/// Both sides of the augmented/deflated equivalence after `m` steps.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub x_aug: Vector,
    pub x_defl: Vector,
    pub r_aug: Vector,
    pub r_defl: Vector,
    /// `||x_aug - x_defl|| / ||x_aug||`
    pub max_diff: f64,
    /// `||r_aug - r_defl|| / ||b||`
    pub residual_diff: f64,
}

/// Computes the minimum-residual iterate over `x0 + W + K_m(P5 A, P5 r0)`
/// directly, and again as `P4 x~ + Q3 A^H b` from an `m`-step GMRES cycle on
/// `P5 A`, and compares them.
pub fn augmented_deflated_equivalence(
    a: &dyn LinearOperator,
    w: &[Vector],
    b: &[C64],
    x0: Option<&[C64]>,
    m: usize,
) -> Result<EquivalenceReport> {
    let n = a.dim();
    check_len(n, b.len())?;
    let proj = EquivalenceProjectors::new(a, w.to_vec())?;
    let x0 = match x0 {
        Some(x0) => {
            check_len(n, x0.len())?;
            x0.to_vec()
        }
        None => vector::zeros(n),
    };
    let r0 = vector::sub(b, &a.apply(&x0));
    let rhat0 = proj.p5(&r0);
    let op = FnOperator::new(n, |x: &[C64]| proj.p5(&a.apply(x)));

    // deflated side: one GMRES cycle on P5 A x = P5 b
    let mut krylov: Vec<Vector> = Vec::new();
    let x_tilde = if vector::norm(&rhat0) > 0.0 && m > 0 {
        let mut state = ArnoldiState::from_residual(&rhat0)?;
        let mut id = Identity::new(n);
        for _ in 0..m {
            if arnoldi_expand(&mut state, &op, &mut id)? == StepOutcome::Breakdown {
                break;
            }
        }
        let lsq = hessenberg_lsq(&state.hbar(), &state.rhs())?;
        krylov = state.z.clone();
        state.update(&x0, &lsq.solution)
    } else {
        x0.clone()
    };
    let x_defl = vector::add(&proj.p4(&x_tilde), &proj.q3_adjoint(b));

    // augmented side: dense least squares over [W, K_m]
    let mut search: Vec<Vector> = w.to_vec();
    search.extend(krylov);
    let x_aug = if search.is_empty() {
        x0.clone()
    } else {
        let images = apply_all(a, &search);
        let qr = thin_qr(&DenseMatrix::from_columns(n, &images))?;
        if !qr.is_full_rank() {
            return Err(Error::Degenerate("augmented search space is rank deficient".into()));
        }
        let y = solve_upper(&qr.r, &qr.q.adjoint_mul_vec(&r0))?;
        vector::add(&x0, &vector::combine(n, &search, &y))
    };
    let r_aug = vector::sub(b, &a.apply(&x_aug));
    let r_defl = vector::sub(b, &a.apply(&x_defl));
    let xnorm = vector::norm(&x_aug).max(f64::MIN_POSITIVE);
    let bnorm = vector::norm(b).max(f64::MIN_POSITIVE);
    Ok(EquivalenceReport {
        max_diff: vector::norm(&vector::sub(&x_aug, &x_defl)) / xnorm,
        residual_diff: vector::norm(&vector::sub(&r_aug, &r_defl)) / bnorm,
        x_aug,
        x_defl,
        r_aug,
        r_defl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::operators::CsrMatrix;
    use crate::vector::{from_real, unit};

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        vector::norm(&vector::sub(a, b)) <= tol
    }

    #[test]
    fn p1_on_diagonal() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        let d = OrthoDeflation::new(&a, vec![unit(2, 0)]).unwrap();
        assert!(close(&d.p1(&from_real(&[1.0, 1.0])), &from_real(&[0.0, 1.0]), 1e-15));
    }

    #[test]
    fn ortho_diagonal_example() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        let b = from_real(&[1.0, 1.0]);
        let s = deflated_gmres_ortho(&a, &mut Identity::new(2), &[unit(2, 0)], &b, None, &SolveConfig::new(2, 1e-12))
            .unwrap();
        assert!(s.report.converged);
        assert_eq!(s.report.iterations, 1);
        assert!(close(&s.report.solution, &from_real(&[1.0, 0.5]), 1e-14));
        assert!(s.residual_identity < 1e-15);
    }

    #[test]
    fn oblique_diagonal_example() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        let d = ObliqueDeflation::new(&a, vec![unit(2, 0)], vec![unit(2, 0)]).unwrap();
        assert!(close(&d.q2(&from_real(&[3.0, 4.0])), &from_real(&[3.0, 0.0]), 1e-15));
        let b = from_real(&[1.0, 1.0]);
        let s = deflated_gmres_oblique(
            &a,
            &mut Identity::new(2),
            &[unit(2, 0)],
            &[unit(2, 0)],
            &b,
            None,
            &SolveConfig::new(2, 1e-12),
        )
        .unwrap();
        assert!(close(&s.report.solution, &from_real(&[1.0, 0.5]), 1e-14));
    }

    #[test]
    fn oblique_rejects_singular_coupling() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0]));
        assert!(matches!(
            ObliqueDeflation::new(&a, vec![unit(3, 0)], vec![unit(3, 1)]),
            Err(Error::SingularOperator(_))
        ));
    }

    #[test]
    fn equivalence_small_diagonal() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0]));
        let b = vec![c64(1.0, 0.0); 3];
        let rep = augmented_deflated_equivalence(&a, &[unit(3, 0)], &b, None, 2).unwrap();
        assert!(rep.max_diff < 1e-12);
        let rep0 = augmented_deflated_equivalence(&a, &[], &b, None, 2).unwrap();
        assert!(rep0.max_diff < 1e-14);
    }
}
