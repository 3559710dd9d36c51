//! Augmented and deflated Krylov subspace solvers.
//!
//! The crate covers minimum-residual methods for non-Hermitian systems
//! (flexible GMRES, GMRES with deflated restarting, deflated GMRES with
//! orthogonal or oblique projectors, GCRO and GCRO-DR) and the conjugate
//! gradient family for Hermitian positive definite systems (CG, augmented CG,
//! deflated CG and spectral two-level preconditioners). Subspaces harvested
//! from one solve can be recycled into the next system of a sequence.
//!
//! All arithmetic is complex double precision; real data is promoted.
//!
//! ```
//! use augdef::prelude::*;
//!
//! let a = CsrMatrix::from_diagonal(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
//! let b = vec![c64(1.0, 0.0); 2];
//! let report = fgmres_solve(&a, &mut Identity::new(2), &b, None, &SolveConfig::new(2, 1e-12)).unwrap();
//! assert!(report.converged);
//! ```

pub mod cli;
pub mod deflation;
pub mod dense;
pub mod error;
pub mod gcro;
pub mod gmres;
pub mod hpd;
pub mod operators;
pub mod random;
pub mod recycle;
pub mod sequences;
pub mod vector;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub mod prelude {
    pub use crate::c64;
    pub use crate::deflation::{
        augmented_deflated_equivalence, deflated_gmres_oblique, deflated_gmres_ortho, spectral_translation,
        ObliqueDeflation, OrthoDeflation,
    };
    pub use crate::dense::{dense_eig, hermitian_eig, hessenberg_lsq, thin_qr, DenseMatrix};
    pub use crate::error::{Error, Result};
    pub use crate::gcro::{gcro_dr_solve, gcro_solve, OuterSpace};
    pub use crate::gmres::{fgmres_solve, ConvergenceHistory, SolveConfig, SolveReport};
    pub use crate::hpd::{
        augmented_cg_solve, build_spectral_preconditioner, cg_bound, cg_solve, deflated_cg_solve,
        effective_condition_number, AugBasis, CgConfig, CgReport, SpectralKind,
    };
    pub use crate::operators::{
        make_test_operator, CsrMatrix, Identity, Jacobi, LinearOperator, Mixing, Preconditioner, SpectrumSpec,
    };
    pub use crate::recycle::{gmres_dr_solve, HarmonicSpec, RecycleSpace, Which};
    pub use crate::sequences::{solve_sequence, Method, MethodParams, RecycleStrategy, SequenceConfig, SystemSequence};
    pub use crate::C64;
}
