//! Conjugate gradients for Hermitian positive definite systems, with
//! augmentation, deflation and spectral two-level preconditioners.

mod basis;
mod ritz;
mod spectral;

pub use basis::{
    augmented_cg_solve, deflated_cg_solve, effective_condition_number, project_initial_guess, AugBasis,
};
pub use ritz::{cg_tridiagonal, lanczos_ritz, rayleigh_ritz, RitzPairs};
pub use spectral::{
    build_spectral_preconditioner, coarse_condition_holds, default_nu, hermitian_spectrum, preconditioned_spectrum,
    SpectralKind,
    SpectralPreconditioner,
};

use crate::error::{check_len, Error, Result};
use crate::gmres::{ConvergenceHistory, SolveReport};
use crate::operators::{LinearOperator, Preconditioner};
use crate::vector::{self, Vector};
use crate::C64;

#[derive(Clone, Debug)]
pub struct CgConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Exact solution; enables the A-norm error history.
    pub exact: Option<Vector>,
    /// Keep the coefficients and normalized residuals for Ritz extraction.
    pub record_lanczos: bool,
    /// Measure residual and direction orthogonality while iterating.
    pub check_orthogonality: bool,
}

impl CgConfig {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self { tol, max_iter, exact: None, record_lanczos: false, check_orthogonality: false }
    }

    pub fn with_exact(mut self, x: Vector) -> Self {
        self.exact = Some(x);
        self
    }

    pub fn with_lanczos(mut self) -> Self {
        self.record_lanczos = true;
        self
    }

    pub fn with_checks(mut self) -> Self {
        self.check_orthogonality = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

/// CG coefficients and normalized residuals `r_j / ||r_j||`.
#[derive(Clone, Debug, Default)]
pub struct LanczosRecord {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub vectors: Vec<Vector>,
}

/// Worst normalized inner products seen over a sliding window of 5.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OrthogonalityChecks {
    pub residuals: f64,
    pub directions: f64,
    /// A-orthogonality of directions to the augmentation basis.
    pub basis: f64,
}

#[derive(Clone, Debug)]
pub struct CgReport {
    pub solution: Vector,
    pub converged: bool,
    pub iterations: usize,
    pub final_relres: f64,
    pub history: ConvergenceHistory,
    pub a_norm_errors: Option<Vec<f64>>,
    pub lanczos: Option<LanczosRecord>,
    pub checks: Option<OrthogonalityChecks>,
}

impl CgReport {
    pub fn into_solve_report(self) -> SolveReport {
        SolveReport {
            solution: self.solution,
            converged: self.converged,
            iterations: self.iterations,
            final_relres: self.final_relres,
            history: self.history,
            last_cycle: None,
            recycle: None,
        }
    }
}

/// `2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^ell`
pub fn cg_bound(kappa: f64, ell: usize) -> Result<f64> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::invalid(format!("condition number must be >= 1, got {kappa}")));
    }
    let s = kappa.sqrt();
    let rho = (s - 1.0) / (s + 1.0);
    Ok(2.0 * rho.powi(ell.min(i32::MAX as usize) as i32))
}

/// Direction correction `p -= W mu` with `mu = (W^H A W)^{-1} (AW)^H z`.
pub(crate) trait DirectionProjector {
    fn project(&self, p: &mut Vector, z: &[C64]);
    fn basis_defect(&self, _p: &[C64], _ap: &[C64]) -> f64 {
        0.0
    }
}

struct NoProjection;

impl DirectionProjector for NoProjection {
    fn project(&self, _p: &mut Vector, _z: &[C64]) {}
}

/// Shared CG iteration. `norm_ref` scales the residual history; the caller
/// recomputes the true residual of its own system.
pub(crate) fn cg_core(
    op: &dyn LinearOperator,
    b: &[C64],
    x0: Vector,
    cfg: &CgConfig,
    mut precond: Option<&mut dyn Preconditioner>,
    proj: &dyn DirectionProjector,
    norm_ref: f64,
) -> Result<CgReport> {
    cfg.validate()?;
    let n = op.dim();
    check_len(n, b.len())?;
    check_len(n, x0.len())?;
    let target = cfg.tol * norm_ref;
    let mut x = x0;
    let mut r = vector::sub(b, &op.apply(&x));
    let mut rnorm = vector::norm(&r);
    let mut history = ConvergenceHistory::new(rnorm / norm_ref);
    let a_err = |x: &[C64]| -> Option<f64> {
        cfg.exact.as_ref().map(|xs| {
            let e = vector::sub(xs, x);
            vector::dot(&e, &op.apply(&e)).re.max(0.0).sqrt()
        })
    };
    let mut errors = cfg.exact.as_ref().map(|_| vec![a_err(&x).unwrap_or(0.0)]);
    let mut lanczos = cfg.record_lanczos.then(LanczosRecord::default);
    let mut checks = cfg.check_orthogonality.then(OrthogonalityChecks::default);
    let mut window_r: Vec<Vector> = Vec::new();
    let mut window_p: Vec<(Vector, Vector)> = Vec::new();

    let precondition = |r: &[C64], pc: &mut Option<&mut dyn Preconditioner>| -> Vector {
        match pc {
            Some(m) => m.apply(r),
            None => r.to_vec(),
        }
    };
    let mut z = precondition(&r, &mut precond);
    let mut rz = vector::dot(&r, &z).re;
    let mut p = z.clone();
    proj.project(&mut p, &z);
    let mut iterations = 0;
    if rnorm > target {
        history.mark_cycle();
    }
    while rnorm > target && iterations < cfg.max_iter {
        if let Some(rec) = lanczos.as_mut() {
            rec.vectors.push(vector::scaled(C64::new(1.0 / rnorm, 0.0), &r));
        }
        let ap = op.apply(&p);
        let pap = vector::dot(&p, &ap).re;
        if !(pap > 0.0) {
            return Err(Error::NotHpd(pap));
        }
        if let Some(c) = checks.as_mut() {
            let rn = vector::norm(&r);
            for old in &window_r {
                let v = vector::dot(old, &r).norm() / (vector::norm(old) * rn);
                c.residuals = c.residuals.max(v);
            }
            for (oldp, oldap) in &window_p {
                let scale = (vector::dot(oldp, oldap).re * pap).sqrt();
                c.directions = c.directions.max(vector::dot(oldp, &ap).norm() / scale);
            }
            c.basis = c.basis.max(proj.basis_defect(&p, &ap));
            window_r.push(r.clone());
            window_p.push((p.clone(), ap.clone()));
            if window_r.len() > 5 {
                window_r.remove(0);
                window_p.remove(0);
            }
        }
        let alpha = rz / pap;
        vector::axpy(C64::new(alpha, 0.0), &p, &mut x);
        vector::axpy(C64::new(-alpha, 0.0), &ap, &mut r);
        rnorm = vector::norm(&r);
        iterations += 1;
        history.push(rnorm / norm_ref);
        if let Some(errs) = errors.as_mut() {
            errs.push(a_err(&x).unwrap_or(0.0));
        }
        z = precondition(&r, &mut precond);
        let rz_new = vector::dot(&r, &z).re;
        let beta = rz_new / rz;
        if let Some(rec) = lanczos.as_mut() {
            rec.alpha.push(alpha);
            rec.beta.push(beta);
        }
        rz = rz_new;
        let mut pn = z.clone();
        vector::axpy(C64::new(beta, 0.0), &p, &mut pn);
        proj.project(&mut pn, &z);
        p = pn;
    }
    Ok(CgReport {
        converged: rnorm <= target,
        final_relres: rnorm / norm_ref,
        solution: x,
        iterations,
        history,
        a_norm_errors: errors,
        lanczos,
        checks,
    })
}

fn require_hermitian(a: &dyn LinearOperator) -> Result<()> {
    if a.is_hermitian() {
        Ok(())
    } else {
        Err(Error::invalid("CG needs an operator that claims to be Hermitian"))
    }
}

fn true_residual(report: &mut CgReport, a: &dyn LinearOperator, b: &[C64], tol: f64) {
    let bnorm = vector::norm(b);
    let r = vector::sub(b, &a.apply(&report.solution));
    report.final_relres = if bnorm > 0.0 { vector::norm(&r) / bnorm } else { 0.0 };
    report.converged = report.final_relres <= tol;
}

/// Preconditioned CG; `m` must be a fixed Hermitian positive definite action.
pub fn cg_solve(
    a: &dyn LinearOperator,
    b: &[C64],
    x0: Option<&[C64]>,
    cfg: &CgConfig,
    m: Option<&mut dyn Preconditioner>,
) -> Result<CgReport> {
    require_hermitian(a)?;
    let n = a.dim();
    check_len(n, b.len())?;
    let x0 = match x0 {
        Some(x) => x.to_vec(),
        None => vector::zeros(n),
    };
    let bnorm = vector::norm(b);
    if bnorm == 0.0 {
        return Ok(trivial(n));
    }
    let mut rep = cg_core(a, b, x0, cfg, m, &NoProjection, bnorm)?;
    true_residual(&mut rep, a, b, cfg.tol);
    Ok(rep)
}

fn trivial(n: usize) -> CgReport {
    CgReport {
        solution: vector::zeros(n),
        converged: true,
        iterations: 0,
        final_relres: 0.0,
        history: ConvergenceHistory::new(0.0),
        a_norm_errors: None,
        lanczos: None,
        checks: None,
    }
}
