//! Sequences of linear systems solved one after another, carrying a
//! harvested subspace from each solve into the next.

mod manifest;
mod method;

pub use manifest::{auto_eig_space, load_deflation_space, load_matrix, load_rhs, SequenceManifest, SystemSpec};
pub use method::{run_method, DeflationSpace, Method, MethodParams, MethodRun};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::gmres::SolveReport;
use crate::hpd::{lanczos_ritz, rayleigh_ritz, LanczosRecord, RitzPairs};
use crate::operators::{Identity, LinearOperator, Preconditioner};
use crate::recycle::{harvest, HarmonicSpec, RecycleSpace};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecycleKind {
    None,
    HarmonicDr,
    HpdEigs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecycleStrategy {
    pub kind: RecycleKind,
    pub k: usize,
}

impl RecycleStrategy {
    pub fn none() -> Self {
        Self { kind: RecycleKind::None, k: 0 }
    }

    pub fn harmonic(k: usize) -> Self {
        Self { kind: RecycleKind::HarmonicDr, k }
    }

    pub fn hpd_eigs(k: usize) -> Self {
        Self { kind: RecycleKind::HpdEigs, k }
    }

    /// Whether `method` can consume the spaces this strategy harvests.
    pub fn supports(&self, method: Method) -> bool {
        match self.kind {
            RecycleKind::None => true,
            RecycleKind::HarmonicDr => matches!(method, Method::GmresDr | Method::GcroDr),
            RecycleKind::HpdEigs => matches!(method, Method::AugCg | Method::DeflCg),
        }
    }
}

/// One system of a sequence.
pub struct SystemEntry {
    pub operator: Box<dyn LinearOperator>,
    pub rhs: Vector,
    pub method: Option<Method>,
    pub precond: Option<Box<dyn Preconditioner>>,
}

/// Ordered systems sharing one dimension.
#[derive(Default)]
pub struct SystemSequence {
    systems: Vec<SystemEntry>,
}

impl SystemSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> Option<usize> {
        self.systems.first().map(|s| s.operator.dim())
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn push(&mut self, entry: SystemEntry) -> Result<()> {
        let n = entry.operator.dim();
        if let Some(d) = self.dim() {
            check_len(d, n)?;
        }
        check_len(n, entry.rhs.len())?;
        if let Some(m) = &entry.precond {
            check_len(n, m.dim())?;
        }
        self.systems.push(entry);
        Ok(())
    }

    /// Appends `(a, b)` with the sequence-wide method and no preconditioner.
    pub fn push_system(&mut self, a: impl LinearOperator + 'static, b: Vector) -> Result<()> {
        self.push(SystemEntry { operator: Box::new(a), rhs: b, method: None, precond: None })
    }
}

/// Sequence-wide defaults.
#[derive(Clone, Debug)]
pub struct SequenceConfig {
    pub method: Method,
    pub params: MethodParams,
    /// Fixed deflation space used while no harvested space is available.
    pub deflation: Option<DeflationSpace>,
}

/// What a finished solve leaves behind for the next system.
#[derive(Clone)]
pub enum SolveState<'a> {
    Krylov(&'a SolveReport),
    Lanczos {
        a: &'a dyn LinearOperator,
        record: &'a LanczosRecord,
        /// Basis the solve was augmented or deflated with.
        previous: &'a [Vector],
    },
}

#[derive(Clone, Debug)]
pub enum Harvested {
    Empty,
    Krylov(RecycleSpace),
    Eigen(RitzPairs),
}

impl Harvested {
    pub fn dim(&self) -> usize {
        match self {
            Harvested::Empty => 0,
            Harvested::Krylov(s) => s.k(),
            Harvested::Eigen(p) => p.vectors.len(),
        }
    }
}

/// Extracts the subspace to recycle from a finished solve.
///
/// Krylov solves use the harmonic Ritz space the solver kept (or harvest it
/// from the final cycle). CG solves use Ritz vectors of the Lanczos
/// tridiagonal, refined together with the previous basis by a Rayleigh-Ritz
/// step on `A`.
pub fn harvest_recycle_space(state: &SolveState<'_>, strategy: &RecycleStrategy) -> Result<Harvested> {
    if strategy.kind == RecycleKind::None || strategy.k == 0 {
        return Ok(Harvested::Empty);
    }
    match (strategy.kind, state) {
        (RecycleKind::HarmonicDr, SolveState::Krylov(rep)) => {
            if let Some(space) = &rep.recycle {
                return Ok(Harvested::Krylov(space.clone()));
            }
            let record = rep.last_cycle.as_ref().ok_or(Error::HarvestTooSmall { needed: strategy.k, available: 0 })?;
            let available = record.state.dim();
            if available < strategy.k {
                return Err(Error::HarvestTooSmall { needed: strategy.k, available });
            }
            Ok(Harvested::Krylov(harvest(record, &HarmonicSpec::smallest(strategy.k)?)?))
        }
        (RecycleKind::HpdEigs, SolveState::Lanczos { a, record, previous }) => {
            if previous.is_empty() {
                return Ok(Harvested::Eigen(lanczos_ritz(record, strategy.k)?));
            }
            let fresh = record.alpha.len().min(record.vectors.len()).min(2 * strategy.k);
            let mut candidates = previous.to_vec();
            if fresh > 0 {
                candidates.extend(lanczos_ritz(record, fresh)?.vectors);
            }
            Ok(Harvested::Eigen(rayleigh_ritz(*a, &candidates, strategy.k)?))
        }
        _ => Err(Error::invalid("recycle strategy does not match the solve that produced the state")),
    }
}

/// Result for one system of a sequence.
#[derive(Debug)]
pub struct SequenceOutcome {
    pub index: usize,
    pub method: Method,
    /// Dimension of the recycled space the solve started with.
    pub recycled_dim: usize,
    pub result: Result<SolveReport>,
}

/// Solves every system in order. Failures are recorded and the sequence
/// continues with whatever space was carried before the failure.
pub fn solve_sequence(
    seq: &mut SystemSequence,
    strategy: &RecycleStrategy,
    config: &SequenceConfig,
) -> Result<Vec<SequenceOutcome>> {
    for (i, s) in seq.systems.iter().enumerate() {
        let m = s.method.unwrap_or(config.method);
        if !strategy.supports(m) {
            return Err(Error::invalid(format!("system {i}: strategy {:?} cannot feed method {m}", strategy.kind)));
        }
    }
    let mut carried = Harvested::Empty;
    let mut out = Vec::with_capacity(seq.len());
    for (index, entry) in seq.systems.iter_mut().enumerate() {
        let method = entry.method.unwrap_or(config.method);
        let recycled_dim = carried.dim();
        let result = solve_one(entry, method, strategy, config, &carried);
        let result = match result {
            Ok((report, next)) => {
                if let Some(next) = next {
                    carried = next;
                }
                Ok(report)
            }
            Err(e) => {
                log::warn!("system {index} failed: {e}");
                Err(e)
            }
        };
        out.push(SequenceOutcome { index, method, recycled_dim, result });
    }
    Ok(out)
}

fn solve_one(
    entry: &mut SystemEntry,
    method: Method,
    strategy: &RecycleStrategy,
    config: &SequenceConfig,
    carried: &Harvested,
) -> Result<(SolveReport, Option<Harvested>)> {
    let a = entry.operator.as_ref();
    let n = a.dim();
    let mut identity = Identity::new(n);
    let m: &mut dyn Preconditioner = match entry.precond.as_mut() {
        Some(p) => p.as_mut(),
        None => &mut identity,
    };
    let warm = match carried {
        Harvested::Krylov(s) => Some(s),
        _ => None,
    };
    let eig_space = match carried {
        Harvested::Eigen(p) => Some(DeflationSpace::new(p.vectors.clone())),
        _ => None,
    };
    let deflation = eig_space.as_ref().or(config.deflation.as_ref());
    let hpd_recycle = strategy.kind == RecycleKind::HpdEigs && strategy.k > 0;
    // the first HPD system has nothing to augment with yet: plain CG
    let effective = if method.is_hpd() && deflation.is_none() { Method::Cg } else { method };
    let run = run_method(effective, a, m, &entry.rhs, None, &config.params, deflation, warm, hpd_recycle)?;
    let state = match &run.lanczos {
        Some(record) => SolveState::Lanczos { a, record, previous: deflation.map_or(&[][..], |d| &d.w[..]) },
        None => SolveState::Krylov(&run.report),
    };
    let next = match harvest_recycle_space(&state, strategy) {
        Ok(Harvested::Empty) => None,
        Ok(h) => Some(h),
        Err(e) => {
            log::info!("no recycle space harvested: {e}");
            None
        }
    };
    Ok((run.report, next))
}
