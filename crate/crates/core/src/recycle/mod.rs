//! Augmentation with a given subspace, harmonic Ritz extraction and
//! GMRES with deflated restarting.

mod harmonic;
mod space;

pub use harmonic::{harmonic_ritz, harmonic_ritz_generalized, HarmonicRitz, HarmonicSpec, Which, HARMONIC_COND_LIMIT};
pub use space::{dr_compress, range_defect, Compressed, RecycleSpace};

use crate::dense::hessenberg_lsq;
use crate::error::{check_len, Error, Result};
use crate::gcro::OuterSpace;
use crate::gmres::{
    arnoldi_expand, restarted_fgmres, run_cycle, trivial_report, ArnoldiState, ConvergenceHistory, CycleRecord,
    CycleStop, EventKind, SolveConfig, SolveReport, StepOutcome,
};
use crate::operators::{LinearOperator, Preconditioner};
use crate::vector::{self, Vector};
use crate::C64;

/// Outcome of one cycle over `x0 + range(Z_{m+k})`.
#[derive(Clone, Debug)]
pub struct AugmentedCycle {
    pub x: Vector,
    pub state: ArnoldiState,
    pub y: Vector,
    pub residual_norm: f64,
    /// Set when an augmentation direction did not enlarge the `V` basis.
    pub truncated: bool,
}

/// `m` Arnoldi steps followed by one step per column of `w`, each with
/// `z = M^{-1} w_j`, then the minimum-residual update over all of `Z`.
pub fn augment_with_subspace(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    w: &[Vector],
    steps: usize,
    x0: &[C64],
    b: &[C64],
) -> Result<AugmentedCycle> {
    let n = a.dim();
    check_len(n, b.len())?;
    check_len(n, x0.len())?;
    for wj in w {
        check_len(n, wj.len())?;
    }
    let r0 = vector::sub(b, &a.apply(x0));
    let mut state = ArnoldiState::from_residual(&r0)?;
    for _ in 0..steps {
        if arnoldi_expand(&mut state, a, m)? == StepOutcome::Breakdown {
            break;
        }
    }
    let mut truncated = false;
    for wj in w {
        let z = m.apply(wj);
        if state.step_with_direction(a, z)? == StepOutcome::Breakdown {
            truncated = true;
        }
    }
    let h = state.hbar();
    let lsq = hessenberg_lsq(&h, &state.rhs())?;
    let x = state.update(x0, &lsq.solution);
    Ok(AugmentedCycle { x, state, y: lsq.solution, residual_norm: lsq.residual_norm, truncated })
}

/// GMRES with deflated restarting.
///
/// The first cycle is a plain FGMRES cycle; every later cycle starts from the
/// `config.augment` harmonic Ritz directions selected by `spec.which` and adds
/// `restart - augment` Arnoldi steps. A `warm` space from an earlier system is
/// re-fitted to `a` and used for the first cycle. `config.augment = 0` without
/// a warm space is plain restarted FGMRES.
pub fn gmres_dr_solve(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
    spec: &HarmonicSpec,
    warm: Option<&RecycleSpace>,
) -> Result<SolveReport> {
    config.validate()?;
    let k = config.augment;
    if k == 0 && warm.is_none() {
        return restarted_fgmres(a, m, b, x0, config, vector::norm(b));
    }
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
    let target = config.tol * bnorm;
    let mut r = vector::sub(b, &a.apply(&x));
    let mut rnorm = vector::norm(&r);
    let mut history = ConvergenceHistory::new(rnorm / bnorm);
    let mut pending = None;
    if let Some(space) = warm {
        check_len(n, space.n())?;
        let mut outer = OuterSpace::new(n);
        for z in space.z.iter().take(config.restart - 1) {
            outer.append(a, z)?;
        }
        if outer.k() > 0 {
            outer.project(&mut x, &mut r);
            rnorm = vector::norm(&r);
            history.record(EventKind::RecycleRefresh);
            if rnorm > 0.0 {
                pending = Some(outer.prefix_state(&r));
            }
        }
    }
    let harvest_spec = HarmonicSpec { k: k.max(1), which: spec.which };
    let mut converged = rnorm <= target;
    let mut last_cycle = None;
    let mut cycles = 0;
    while !converged && cycles < config.max_cycles {
        cycles += 1;
        history.mark_cycle();
        let mut state = match pending.take() {
            Some(s) => s,
            None => ArnoldiState::from_residual(&r)?,
        };
        let steps = config.restart.saturating_sub(state.dim()).max(1);
        let out = run_cycle(a, m, &mut state, steps, target, bnorm, &mut history)?;
        x = state.update(&x, &out.y);
        let prev = rnorm;
        r = vector::sub(b, &a.apply(&x));
        rnorm = vector::norm(&r);
        if prev - out.residual_norm < 1e-14 * prev {
            history.record(EventKind::Stagnation);
        }
        converged = rnorm <= target;
        let stop = out.stop;
        let record = CycleRecord { state, y: out.y, residual_norm: out.residual_norm };
        if !converged && stop == CycleStop::Exhausted && k > 0 {
            pending = next_cycle_state(&record, &harvest_spec, config.restart, &mut history)?;
        }
        last_cycle = Some(record);
        if stop == CycleStop::Breakdown {
            break;
        }
    }
    let recycle = last_cycle.as_ref().and_then(|c| harvest(c, &harvest_spec).ok());
    Ok(SolveReport {
        solution: x,
        converged,
        iterations: history.iterations(),
        final_relres: rnorm / bnorm,
        history,
        last_cycle,
        recycle,
    })
}

fn next_cycle_state(
    record: &CycleRecord,
    spec: &HarmonicSpec,
    restart: usize,
    history: &mut ConvergenceHistory,
) -> Result<Option<ArnoldiState>> {
    let hr = match harmonic_ritz(&record.state.hbar(), spec) {
        Ok(hr) => hr,
        Err(Error::HarmonicBreakdown(msg)) => {
            log::debug!("harmonic breakdown, plain restart: {msg}");
            history.record(EventKind::HarmonicBreakdown);
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let hr = truncate(hr, restart - 1);
    let comp = dr_compress(&record.state, &hr, &record.y)?;
    if comp.dropped > 0 || comp.space.k() < spec.k {
        history.record(EventKind::DimensionTruncated);
    }
    if comp.space.k() == 0 {
        return Ok(None);
    }
    history.record(EventKind::RecycleRefresh);
    let s = comp.space;
    Ok(Some(ArnoldiState::from_prefix(s.z, s.v, &s.hbar, comp.residual_coords)))
}

fn truncate(hr: HarmonicRitz, k: usize) -> HarmonicRitz {
    if hr.k() <= k {
        return hr;
    }
    HarmonicRitz { p: hr.p.block(0, hr.p.rows(), 0, k), theta: hr.theta[..k].to_vec() }
}

/// Harmonic Ritz harvest from a completed cycle, padded when the cycle ended
/// in an invariant subspace.
pub fn harvest(record: &CycleRecord, spec: &HarmonicSpec) -> Result<RecycleSpace> {
    let st = &record.state;
    let l = st.dim();
    if l == 0 {
        return Err(Error::HarvestTooSmall { needed: spec.k, available: 0 });
    }
    let h = st.hbar().resize(l + 1, l);
    let spec = HarmonicSpec { k: spec.k.min(l), which: spec.which };
    let hr = harmonic_ritz(&h, &spec)?;
    Ok(dr_compress(st, &hr, &record.y)?.space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmres::fgmres_solve;
    use crate::operators::{make_test_operator, CsrMatrix, Identity, Mixing, SpectrumSpec};
    use crate::vector::{from_real, unit};

    #[test]
    fn augmenting_with_missing_direction_is_exact() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0]));
        let b = from_real(&[1.0, 1.0, 1.0]);
        let cyc = augment_with_subspace(&a, &mut Identity::new(3), &[unit(3, 2)], 2, &vector::zeros(3), &b).unwrap();
        assert!(cyc.residual_norm < 1e-12);
        let want = from_real(&[1.0, 0.5, 1.0 / 3.0]);
        assert!(vector::norm(&vector::sub(&cyc.x, &want)) < 1e-12);
    }

    #[test]
    fn empty_augmentation_matches_plain_cycle() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0, 4.0]));
        let b = from_real(&[1.0, -1.0, 2.0, 0.5]);
        let x0 = vector::zeros(4);
        let aug = augment_with_subspace(&a, &mut Identity::new(4), &[], 2, &x0, &b).unwrap();
        let plain = crate::gmres::fgmres_cycle(&a, &mut Identity::new(4), &b, &x0, &SolveConfig::new(2, 1e-14)).unwrap();
        assert!(vector::norm(&vector::sub(&aug.x, &plain.x)) < 1e-13);
    }

    #[test]
    fn zero_augment_equals_fgmres() {
        let a = CsrMatrix::from_diagonal(&from_real(&(1..=12).map(f64::from).collect::<Vec<_>>()));
        let b = from_real(&[1.0; 12]);
        let cfg = SolveConfig::new(4, 1e-10);
        let spec = HarmonicSpec::smallest(1).unwrap();
        let dr = gmres_dr_solve(&a, &mut Identity::new(12), &b, None, &cfg, &spec, None).unwrap();
        let pl = fgmres_solve(&a, &mut Identity::new(12), &b, None, &cfg).unwrap();
        assert_eq!(dr.history.relres, pl.history.relres);
    }

    #[test]
    fn dr_converges_and_harvests() {
        let op = make_test_operator(&SpectrumSpec::clustered(60, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Orthogonal { seed: 3 }))
            .unwrap();
        let b = from_real(&[1.0; 60]);
        let cfg = SolveConfig::new(12, 1e-9).with_augment(3);
        let spec = HarmonicSpec::smallest(3).unwrap();
        let rep = gmres_dr_solve(&op, &mut Identity::new(60), &b, None, &cfg, &spec, None).unwrap();
        assert!(rep.converged, "relres {}", rep.final_relres);
        let space = rep.recycle.expect("harvest");
        assert!(space.relation_residual(&op) <= 1e-10 * op.matrix.frobenius_norm() * space.z_norm());
        assert!(space.orthonormality_error() <= 1e-11);
    }
}
