use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::deflation::{deflated_gmres_oblique, deflated_gmres_ortho};
use crate::error::{Error, Result};
use crate::gcro::{gcro_dr_solve, gcro_solve};
use crate::gmres::{fgmres_solve, SolveConfig, SolveReport};
use crate::hpd::{augmented_cg_solve, cg_solve, deflated_cg_solve, AugBasis, CgConfig, LanczosRecord};
use crate::operators::{LinearOperator, Preconditioner};
use crate::recycle::{gmres_dr_solve, HarmonicSpec, RecycleSpace, Which};
use crate::vector::Vector;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Cg,
    AugCg,
    DeflCg,
    Gmres,
    Fgmres,
    GmresDr,
    DeflGmres,
    DeflGmresOblique,
    Gcro,
    GcroDr,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Cg,
        Method::AugCg,
        Method::DeflCg,
        Method::Gmres,
        Method::Fgmres,
        Method::GmresDr,
        Method::DeflGmres,
        Method::DeflGmresOblique,
        Method::Gcro,
        Method::GcroDr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cg => "cg",
            Method::AugCg => "aug-cg",
            Method::DeflCg => "defl-cg",
            Method::Gmres => "gmres",
            Method::Fgmres => "fgmres",
            Method::GmresDr => "gmres-dr",
            Method::DeflGmres => "defl-gmres",
            Method::DeflGmresOblique => "defl-gmres-oblique",
            Method::Gcro => "gcro",
            Method::GcroDr => "gcro-dr",
        }
    }

    /// CG family; requires a Hermitian positive definite operator.
    pub fn is_hpd(self) -> bool {
        matches!(self, Method::Cg | Method::AugCg | Method::DeflCg)
    }

    pub fn needs_deflation_space(self) -> bool {
        matches!(self, Method::AugCg | Method::DeflCg | Method::DeflGmres | Method::DeflGmresOblique)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Numeric knobs shared by every method.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodParams {
    pub restart: usize,
    pub recycle_dim: usize,
    pub tol: f64,
    /// Iteration cap; GMRES-type methods round it up to whole cycles.
    pub max_iter: usize,
    pub which: Which,
}

impl MethodParams {
    pub fn new(restart: usize, recycle_dim: usize, tol: f64, max_iter: usize) -> Self {
        Self { restart, recycle_dim, tol, max_iter, which: Which::SmallestModulus }
    }

    pub fn solve_config(&self) -> SolveConfig {
        let cycles = self.max_iter.div_ceil(self.restart.max(1)).max(1);
        SolveConfig::new(self.restart, self.tol).with_max_cycles(cycles).with_augment(self.recycle_dim)
    }

    pub fn cg_config(&self) -> CgConfig {
        CgConfig::new(self.tol, self.max_iter)
    }

    fn harmonic_spec(&self) -> HarmonicSpec {
        HarmonicSpec { k: self.recycle_dim.max(1), which: self.which }
    }
}

/// Deflation basis `W` and, for the oblique projector, the test basis `W~`.
#[derive(Clone, Debug, Default)]
pub struct DeflationSpace {
    pub w: Vec<Vector>,
    pub wt: Option<Vec<Vector>>,
}

impl DeflationSpace {
    pub fn new(w: Vec<Vector>) -> Self {
        Self { w, wt: None }
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }
}

/// A finished solve plus the Lanczos data of CG-type methods.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub report: SolveReport,
    pub lanczos: Option<LanczosRecord>,
}

/// Runs `method` on `a x = b`.
///
/// `deflation` feeds the deflated and augmented methods; `warm` seeds
/// GMRES-DR and GCRO-DR. `record_lanczos` keeps the CG coefficients and
/// residual directions for later Ritz harvesting.
#[allow(clippy::too_many_arguments)]
pub fn run_method(
    method: Method,
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    params: &MethodParams,
    deflation: Option<&DeflationSpace>,
    warm: Option<&RecycleSpace>,
    record_lanczos: bool,
) -> Result<MethodRun> {
    let space = || -> Result<&DeflationSpace> {
        deflation
            .filter(|d| d.k() > 0)
            .ok_or_else(|| Error::invalid(format!("method {method} needs a deflation space")))
    };
    let plain = |report| Ok(MethodRun { report, lanczos: None });
    match method {
        Method::Cg | Method::AugCg | Method::DeflCg => {
            let mut cfg = params.cg_config();
            cfg.record_lanczos = record_lanczos;
            let rep = match method {
                Method::Cg => cg_solve(a, b, x0, &cfg, Some(m))?,
                Method::AugCg => augmented_cg_solve(a, b, &AugBasis::new(a, space()?.w.clone())?, x0, &cfg)?,
                _ => deflated_cg_solve(a, b, &AugBasis::new(a, space()?.w.clone())?, &cfg)?,
            };
            let lanczos = rep.lanczos.clone();
            Ok(MethodRun { report: rep.into_solve_report(), lanczos })
        }
        Method::Gmres | Method::Fgmres => {
            let mut cfg = params.solve_config();
            cfg.augment = 0;
            plain(fgmres_solve(a, m, b, x0, &cfg)?)
        }
        Method::GmresDr => plain(gmres_dr_solve(a, m, b, x0, &params.solve_config(), &params.harmonic_spec(), warm)?),
        Method::GcroDr => plain(gcro_dr_solve(a, m, b, x0, &params.solve_config(), &params.harmonic_spec(), warm)?),
        Method::Gcro => plain(gcro_solve(a, m, b, x0, &params.solve_config())?),
        Method::DeflGmres => {
            let mut cfg = params.solve_config();
            cfg.augment = 0;
            plain(deflated_gmres_ortho(a, m, &space()?.w, b, x0, &cfg)?.report)
        }
        Method::DeflGmresOblique => {
            let mut cfg = params.solve_config();
            cfg.augment = 0;
            let d = space()?;
            let wt = d.wt.as_ref().unwrap_or(&d.w);
            plain(deflated_gmres_oblique(a, m, &d.w, wt, b, x0, &cfg)?.report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{CsrMatrix, Identity};
    use crate::vector::{from_real, unit};

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!(matches!("bicgstab".parse::<Method>(), Err(Error::UnknownMethod(_))));
    }

    #[test]
    fn every_method_solves_a_diagonal_system() {
        let a = CsrMatrix::from_diagonal(&from_real(&(1..=10).map(f64::from).collect::<Vec<_>>()));
        let b = from_real(&[1.0; 10]);
        let params = MethodParams::new(6, 2, 1e-10, 200);
        let defl = DeflationSpace::new(vec![unit(10, 0), unit(10, 1)]);
        for m in Method::ALL {
            let run = run_method(m, &a, &mut Identity::new(10), &b, None, &params, Some(&defl), None, false).unwrap();
            assert!(run.report.converged, "{m}: {}", run.report.final_relres);
        }
    }

    #[test]
    fn deflated_methods_need_a_space() {
        let a = CsrMatrix::identity(3);
        let err = run_method(
            Method::DeflGmres,
            &a,
            &mut Identity::new(3),
            &[C64::new(1.0, 0.0); 3],
            None,
            &MethodParams::new(3, 0, 1e-8, 10),
            None,
            None,
            false,
        );
        assert!(err.is_err());
    }
}
