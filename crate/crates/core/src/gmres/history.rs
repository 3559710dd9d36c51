use std::fmt;

use serde::Serialize;

/// Notable solver events recorded against an iteration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// Arnoldi remainder vanished and the least-squares residual did too.
    HappyBreakdown,
    /// Arnoldi remainder vanished with a nonzero residual (singular operator).
    Breakdown,
    Stagnation,
    RecycleRefresh,
    HarmonicBreakdown,
    /// An augmentation or recycle basis lost columns to numerical dependence.
    DimensionTruncated,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::HappyBreakdown => "happy-breakdown",
            EventKind::Breakdown => "breakdown",
            EventKind::Stagnation => "stagnation",
            EventKind::RecycleRefresh => "recycle-refresh",
            EventKind::HarmonicBreakdown => "harmonic-breakdown",
            EventKind::DimensionTruncated => "dimension-truncated",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    pub iteration: usize,
    pub kind: EventKind,
}

/// Relative residual per iteration (entry 0 is the initial residual), the
/// iteration indices at which cycles started, and tagged events.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConvergenceHistory {
    pub relres: Vec<f64>,
    pub cycle_marks: Vec<usize>,
    pub events: Vec<Event>,
}

impl ConvergenceHistory {
    pub fn new(initial_relres: f64) -> Self {
        Self { relres: vec![initial_relres], ..Default::default() }
    }

    /// Iterations recorded so far (entries after the initial one).
    pub fn iterations(&self) -> usize {
        self.relres.len().saturating_sub(1)
    }

    pub fn push(&mut self, relres: f64) {
        self.relres.push(relres);
    }

    pub fn mark_cycle(&mut self) {
        self.cycle_marks.push(self.iterations());
    }

    pub fn record(&mut self, kind: EventKind) {
        self.events.push(Event { iteration: self.iterations(), kind });
    }

    pub fn has_event(&self, kind: EventKind) -> bool {
        self.events.iter().any(|e| e.kind == kind)
    }

    pub fn cycles(&self) -> usize {
        self.cycle_marks.len()
    }

    /// 1-based cycle that iteration `it` belongs to; 0 for the initial residual.
    pub fn cycle_of(&self, it: usize) -> usize {
        self.cycle_marks.iter().filter(|&&m| m < it).count()
    }
}
