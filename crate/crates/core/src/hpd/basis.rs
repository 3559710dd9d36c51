use crate::dense::{hermitian_eig, Cholesky, DenseMatrix, DENSE_EIG_CAP};
use crate::error::{check_len, Error, Result};
use crate::operators::{apply_all, FnOperator, LinearOperator};
use crate::vector::{self, Vector};
use crate::C64;

use super::{cg_core, require_hermitian, trivial, true_residual, CgConfig, CgReport, DirectionProjector};

/// Augmentation basis `W` with `A W` and the Cholesky factor of `W^H A W`.
#[derive(Clone, Debug)]
pub struct AugBasis {
    pub w: Vec<Vector>,
    pub aw: Vec<Vector>,
    g: Cholesky,
    gram: DenseMatrix,
}

impl AugBasis {
    pub fn new(a: &dyn LinearOperator, w: Vec<Vector>) -> Result<Self> {
        let n = a.dim();
        if w.len() >= n && n > 0 {
            return Err(Error::invalid(format!("basis has {} columns for n = {n}", w.len())));
        }
        for col in &w {
            check_len(n, col.len())?;
            if !vector::is_finite(col) {
                return Err(Error::NonFinite("augmentation basis"));
            }
        }
        let aw = apply_all(a, &w);
        let k = w.len();
        let raw = DenseMatrix::from_fn(k, k, |i, j| vector::dot(&w[i], &aw[j]));
        let gram = raw.add(&raw.adjoint()).scaled(C64::new(0.5, 0.0));
        let g = Cholesky::factor(&gram)?;
        Ok(Self { w, aw, g, gram })
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn gram(&self) -> &DenseMatrix {
        &self.gram
    }

    /// `(W^H A W)^{-1} v`
    pub fn solve(&self, v: &[C64]) -> Vector {
        self.g.solve_vec(v)
    }

    /// `W (W^H A W)^{-1} W^H b`
    pub fn coarse(&self, b: &[C64]) -> Vector {
        vector::combine(b.len(), &self.w, &self.solve(&vector::adjoint_times(&self.w, b)))
    }

    /// `P6 x = x - W (W^H A W)^{-1} W^H A x`
    pub fn p6(&self, x: &[C64]) -> Vector {
        let c = self.solve(&vector::adjoint_times(&self.aw, x));
        vector::sub(x, &vector::combine(x.len(), &self.w, &c))
    }

    /// `P6^H x = x - A W (W^H A W)^{-1} W^H x`
    pub fn p6_adjoint(&self, x: &[C64]) -> Vector {
        let c = self.solve(&vector::adjoint_times(&self.w, x));
        vector::sub(x, &vector::combine(x.len(), &self.aw, &c))
    }
}

impl DirectionProjector for AugBasis {
    fn project(&self, p: &mut Vector, z: &[C64]) {
        if self.k() == 0 {
            return;
        }
        let mu = self.solve(&vector::adjoint_times(&self.aw, z));
        for (wi, &m) in self.w.iter().zip(&mu) {
            vector::axpy(-m, wi, p);
        }
    }

    fn basis_defect(&self, p: &[C64], ap: &[C64]) -> f64 {
        let pap = vector::dot(p, ap).re.max(f64::MIN_POSITIVE);
        self.aw
            .iter()
            .enumerate()
            .map(|(i, awi)| vector::dot(awi, p).norm() / (self.gram[(i, i)].re * pap).sqrt())
            .fold(0.0, f64::max)
    }
}

/// `x_prev + W (W^H A W)^{-1} W^H (b - A x_prev)`, whose residual is orthogonal to `W`.
pub fn project_initial_guess(x_prev: &[C64], a: &dyn LinearOperator, basis: &AugBasis, b: &[C64]) -> Vector {
    let r = vector::sub(b, &a.apply(x_prev));
    vector::add(x_prev, &basis.coarse(&r))
}

/// CG on the deflated Lanczos operator through the short recurrences
/// `p_j = r_j + beta_{j-1} p_{j-1} - W mu_j`, started from the projected guess.
pub fn augmented_cg_solve(
    a: &dyn LinearOperator,
    b: &[C64],
    basis: &AugBasis,
    x_prev: Option<&[C64]>,
    cfg: &CgConfig,
) -> Result<CgReport> {
    require_hermitian(a)?;
    let n = a.dim();
    check_len(n, b.len())?;
    let bnorm = vector::norm(b);
    if bnorm == 0.0 {
        return Ok(trivial(n));
    }
    let x_prev = match x_prev {
        Some(x) => {
            check_len(n, x.len())?;
            x.to_vec()
        }
        None => vector::zeros(n),
    };
    let x0 = project_initial_guess(&x_prev, a, basis, b);
    let mut rep = cg_core(a, b, x0, cfg, None, basis, bnorm)?;
    true_residual(&mut rep, a, b, cfg.tol);
    Ok(rep)
}

/// CG on the consistent semidefinite system `P6^H A x^ = P6^H b`, then
/// `x = W (W^H A W)^{-1} W^H b + P6 x^`.
pub fn deflated_cg_solve(a: &dyn LinearOperator, b: &[C64], basis: &AugBasis, cfg: &CgConfig) -> Result<CgReport> {
    require_hermitian(a)?;
    let n = a.dim();
    check_len(n, b.len())?;
    let bnorm = vector::norm(b);
    if bnorm == 0.0 {
        return Ok(trivial(n));
    }
    let op = FnOperator::new(n, |x: &[C64]| basis.p6_adjoint(&a.apply(x))).hermitian(true);
    let rhs = basis.p6_adjoint(b);
    let no_proj = super::NoProjection;
    let mut rep = cg_core(&op, &rhs, vector::zeros(n), cfg, None, &no_proj, bnorm)?;
    rep.solution = vector::add(&basis.coarse(b), &basis.p6(&rep.solution));
    true_residual(&mut rep, a, b, cfg.tol);
    Ok(rep)
}

/// `lambda_max / lambda_min+` of `P6^H A`, ignoring eigenvalues below `1e-10 lambda_max`.
pub fn effective_condition_number(a: &dyn LinearOperator, basis: &AugBasis) -> Result<f64> {
    let n = a.dim();
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_EIG_CAP });
    }
    let cols: Vec<Vector> = (0..n).map(|j| basis.p6_adjoint(&a.apply(&vector::unit(n, j)))).collect();
    let d = DenseMatrix::from_columns(n, &cols);
    let h = d.add(&d.adjoint()).scaled(C64::new(0.5, 0.0));
    let (vals, _) = hermitian_eig(&h)?;
    let max = vals.last().copied().unwrap_or(0.0);
    if !(max > 0.0) {
        return Err(Error::Degenerate("deflated operator has no positive eigenvalue".into()));
    }
    let min = vals
        .iter()
        .copied()
        .find(|&v| v > 1e-10 * max)
        .ok_or_else(|| Error::Degenerate("all eigenvalues below threshold".into()))?;
    Ok(max / min)
}
