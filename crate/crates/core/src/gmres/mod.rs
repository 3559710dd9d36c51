//! Flexible GMRES with restarting over the generalized Arnoldi relation
//! `A Z = V Hbar`.

mod arnoldi;
mod history;

pub use arnoldi::{arnoldi_expand, ArnoldiState, StepOutcome};
pub use history::{ConvergenceHistory, Event, EventKind};

use crate::dense::GivensLsq;
use crate::error::{check_len, Error, Result};
use crate::operators::{LinearOperator, Preconditioner};
use crate::recycle::RecycleSpace;
use crate::vector::{self, Vector};
use crate::C64;

/// Restart length `l = m + k`, relative tolerance, cycle budget and
/// augmentation dimension `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub restart: usize,
    pub tol: f64,
    pub max_cycles: usize,
    pub augment: usize,
}

impl SolveConfig {
    pub fn new(restart: usize, tol: f64) -> Self {
        Self { restart, tol, max_cycles: 1000, augment: 0 }
    }

    pub fn with_max_cycles(mut self, max_cycles: usize) -> Self {
        self.max_cycles = max_cycles;
        self
    }

    pub fn with_augment(mut self, k: usize) -> Self {
        self.augment = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::invalid("restart length must be at least 1"));
        }
        if self.augment >= self.restart {
            return Err(Error::invalid(format!(
                "augmentation dimension {} must be below the restart length {}",
                self.augment, self.restart
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Data of one completed cycle, kept for subspace harvesting.
#[derive(Clone, Debug)]
pub struct CycleRecord {
    pub state: ArnoldiState,
    /// Least-squares minimizer of the cycle.
    pub y: Vector,
    pub residual_norm: f64,
}

impl CycleRecord {
    /// `c - Hbar y`, the residual coordinates in the `V` basis.
    pub fn residual_coords(&self) -> Vector {
        let h = self.state.hbar();
        let hy = h.mul_vec(&self.y);
        vector::sub(&self.state.rhs(), &hy)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vector,
    pub converged: bool,
    pub iterations: usize,
    /// `||b - A x|| / ||b||` recomputed from the returned solution.
    pub final_relres: f64,
    pub history: ConvergenceHistory,
    pub last_cycle: Option<CycleRecord>,
    /// Subspace harvested at the end of the solve, when the method keeps one.
    pub recycle: Option<RecycleSpace>,
}

impl SolveReport {
    pub fn breakdown(&self) -> bool {
        self.history.has_event(EventKind::Breakdown)
    }

    pub fn cycles(&self) -> usize {
        self.history.cycles()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CycleStop {
    Converged,
    Exhausted,
    HappyBreakdown,
    Breakdown,
}

pub(crate) struct CycleOutcome {
    pub y: Vector,
    pub residual_norm: f64,
    pub stop: CycleStop,
}

/// Runs up to `max_steps` Arnoldi steps on `state`, tracking the
/// least-squares residual incrementally, and returns the cycle minimizer.
pub(crate) fn run_cycle(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    state: &mut ArnoldiState,
    max_steps: usize,
    target: f64,
    norm_ref: f64,
    history: &mut ConvergenceHistory,
) -> Result<CycleOutcome> {
    let beta = vector::norm(&state.c);
    let mut lsq = GivensLsq::new(&state.rhs());
    for col in &state.h_cols {
        lsq.push_column(col);
    }
    let mut steps = 0;
    let mut stop = CycleStop::Exhausted;
    while steps < max_steps {
        let out = arnoldi_expand(state, a, m)?;
        steps += 1;
        let res = lsq.push_column(state.h_cols.last().expect("column just pushed"));
        history.push(res / norm_ref);
        if out == StepOutcome::Breakdown {
            if res <= target || res <= 1e-10 * beta {
                history.record(EventKind::HappyBreakdown);
                stop = CycleStop::HappyBreakdown;
            } else {
                history.record(EventKind::Breakdown);
                stop = CycleStop::Breakdown;
            }
            break;
        }
        if res <= target {
            stop = CycleStop::Converged;
            break;
        }
    }
    if lsq.ncols() == 0 {
        return Ok(CycleOutcome { y: Vec::new(), residual_norm: beta, stop });
    }
    let sol = lsq.solve()?;
    Ok(CycleOutcome { y: sol.solution, residual_norm: sol.residual_norm, stop })
}

pub struct CycleResult {
    pub x: Vector,
    pub record: CycleRecord,
}

/// One FGMRES cycle of at most `config.restart` steps from `x0`.
pub fn fgmres_cycle(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: &[C64],
    config: &SolveConfig,
) -> Result<CycleResult> {
    config.validate()?;
    check_len(a.dim(), b.len())?;
    check_len(a.dim(), x0.len())?;
    let r0 = vector::sub(b, &a.apply(x0));
    let mut state = ArnoldiState::from_residual(&r0)?;
    let bnorm = vector::norm(b).max(f64::MIN_POSITIVE);
    let mut hist = ConvergenceHistory::new(vector::norm(&r0) / bnorm);
    let out = run_cycle(a, m, &mut state, config.restart, config.tol * bnorm, bnorm, &mut hist)?;
    let x = state.update(x0, &out.y);
    Ok(CycleResult { x, record: CycleRecord { state, y: out.y, residual_norm: out.residual_norm } })
}

/// Restarted flexible GMRES; `x0` defaults to zero.
pub fn fgmres_solve(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
) -> Result<SolveReport> {
    let bnorm = vector::norm(b);
    restarted_fgmres(a, m, b, x0, config, bnorm)
}

/// Restarted FGMRES with residuals measured relative to `norm_ref`.
pub(crate) fn restarted_fgmres(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
    norm_ref: f64,
) -> Result<SolveReport> {
    config.validate()?;
    let n = a.dim();
    check_len(n, b.len())?;
    check_len(n, m.dim())?;
    let mut x = match x0 {
        Some(x0) => {
            check_len(n, x0.len())?;
            x0.to_vec()
        }
        None => vector::zeros(n),
    };
    let bnorm = vector::norm(b);
    if bnorm == 0.0 {
        return Ok(trivial_report(n));
    }
    let norm_ref = if norm_ref > 0.0 { norm_ref } else { bnorm };
    let target = config.tol * norm_ref;
    let mut r = vector::sub(b, &a.apply(&x));
    let mut rnorm = vector::norm(&r);
    let mut history = ConvergenceHistory::new(rnorm / norm_ref);
    let mut last_cycle = None;
    let mut converged = rnorm <= target;
    let mut cycles = 0;
    while !converged && cycles < config.max_cycles {
        cycles += 1;
        history.mark_cycle();
        let mut state = ArnoldiState::from_residual(&r)?;
        let out = run_cycle(a, m, &mut state, config.restart, target, norm_ref, &mut history)?;
        x = state.update(&x, &out.y);
        let prev = rnorm;
        r = vector::sub(b, &a.apply(&x));
        rnorm = vector::norm(&r);
        if prev - out.residual_norm < 1e-14 * prev {
            history.record(EventKind::Stagnation);
        }
        let stop = out.stop;
        last_cycle = Some(CycleRecord { state, y: out.y, residual_norm: out.residual_norm });
        converged = rnorm <= target;
        if stop == CycleStop::Breakdown {
            break;
        }
    }
    let final_relres = rnorm / norm_ref;
    Ok(SolveReport {
        solution: x,
        converged,
        iterations: history.iterations(),
        final_relres,
        history,
        last_cycle,
        recycle: None,
    })
}

pub(crate) fn trivial_report(n: usize) -> SolveReport {
    SolveReport {
        solution: vector::zeros(n),
        converged: true,
        iterations: 0,
        final_relres: 0.0,
        history: ConvergenceHistory::new(0.0),
        last_cycle: None,
        recycle: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::operators::{CsrMatrix, Identity, Jacobi};
    use crate::vector::from_real;

    #[test]
    fn identity_converges_in_one_step() {
        let a = CsrMatrix::identity(4);
        let b = from_real(&[1.0, -2.0, 3.0, 0.5]);
        let rep = fgmres_solve(&a, &mut Identity::new(4), &b, None, &SolveConfig::new(4, 1e-12)).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert!(vector::norm(&vector::sub(&rep.solution, &b)) < 1e-14);
    }

    #[test]
    fn two_eigenvalues_two_steps() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        let cyc = fgmres_cycle(&a, &mut Identity::new(2), &from_real(&[1.0, 1.0]), &vector::zeros(2), &SolveConfig::new(2, 1e-14)).unwrap();
        assert_eq!(cyc.record.state.dim(), 2);
        assert!((cyc.x[0] - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((cyc.x[1] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!(cyc.record.residual_norm < 1e-14);
    }

    #[test]
    fn jacobi_inverts_diagonal() {
        let d = from_real(&[1.0, 3.0, 7.0, 11.0]);
        let a = CsrMatrix::from_diagonal(&d);
        let b = from_real(&[1.0, 1.0, 1.0, 1.0]);
        let rep = fgmres_solve(&a, &mut Jacobi::new(&d), &b, None, &SolveConfig::new(4, 1e-12)).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn zero_rhs_is_trivial() {
        let a = CsrMatrix::identity(3);
        let rep = fgmres_solve(&a, &mut Identity::new(3), &vector::zeros(3), None, &SolveConfig::new(3, 1e-8)).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.solution, vector::zeros(3));
    }

    #[test]
    fn invalid_config() {
        assert!(SolveConfig::new(0, 1e-8).validate().is_err());
        assert!(SolveConfig::new(3, 0.0).validate().is_err());
        assert!(SolveConfig::new(3, 1e-8).with_augment(3).validate().is_err());
    }

    #[test]
    fn history_is_monotone_within_cycle() {
        let a = CsrMatrix::from_diagonal(&from_real(&(1..=10).map(f64::from).collect::<Vec<_>>()));
        let b = vec![c64(1.0, 0.0); 10];
        let rep = fgmres_solve(&a, &mut Identity::new(10), &b, None, &SolveConfig::new(3, 1e-8)).unwrap();
        assert!(rep.converged);
        for w in rep.history.relres.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }
}
