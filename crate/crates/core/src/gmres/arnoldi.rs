use crate::dense::{orthonormalize_against, DenseMatrix};
use crate::error::{Error, Result};
use crate::operators::{LinearOperator, Preconditioner};
use crate::vector::{self, Vector};
use crate::C64;

/// Generalized Arnoldi relation `A Z = V Hbar` plus the least-squares
/// right-hand side `c` expressed in the `V` basis.
#[derive(Clone, Debug)]
pub struct ArnoldiState {
    pub v: Vec<Vector>,
    pub z: Vec<Vector>,
    /// Column `j` of `Hbar`, length at most `j + 2` for Arnoldi columns and
    /// up to the current row count for dense leading blocks.
    pub h_cols: Vec<Vector>,
    pub c: Vector,
    /// Set once the last expansion hit a vanishing remainder.
    pub breakdown: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Expanded,
    /// Remainder fell below the breakdown threshold; no new `v` was added.
    Breakdown,
}

impl ArnoldiState {
    /// Fresh state from an initial residual `r0 != 0`: `v1 = r0/beta`, `c = beta e1`.
    pub fn from_residual(r0: &[C64]) -> Result<Self> {
        let beta = vector::norm(r0);
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::invalid("Arnoldi start vector must be nonzero and finite"));
        }
        let v1 = vector::scaled(C64::new(1.0 / beta, 0.0), r0);
        Ok(Self { v: vec![v1], z: Vec::new(), h_cols: Vec::new(), c: vec![C64::new(beta, 0.0)], breakdown: false })
    }

    /// State seeded with an existing relation `A Z_k = V_{k+1} Hbar_k` and
    /// right-hand side `c` of length `k + 1`.
    pub fn from_prefix(z: Vec<Vector>, v: Vec<Vector>, hbar: &DenseMatrix, c: Vector) -> Self {
        assert_eq!(v.len(), z.len() + 1);
        assert_eq!(hbar.rows(), v.len());
        assert_eq!(hbar.cols(), z.len());
        assert_eq!(c.len(), v.len());
        let h_cols = (0..hbar.cols()).map(|j| hbar.col(j).to_vec()).collect();
        Self { v, z, h_cols, c, breakdown: false }
    }

    /// Current dimension `j` (number of `Z` columns).
    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn n(&self) -> usize {
        self.v[0].len()
    }

    /// `Hbar` with `V.len()` rows and `Z.len()` columns.
    pub fn hbar(&self) -> DenseMatrix {
        let rows = self.v.len();
        let mut h = DenseMatrix::zeros(rows, self.z.len());
        for (j, col) in self.h_cols.iter().enumerate() {
            for (i, &val) in col.iter().enumerate().take(rows) {
                h[(i, j)] = val;
            }
        }
        h
    }

    /// `c` padded or truncated to `V.len()` entries.
    pub fn rhs(&self) -> Vector {
        let mut c = self.c.clone();
        c.resize(self.v.len(), C64::new(0.0, 0.0));
        c
    }

    /// `x0 + Z y`
    pub fn update(&self, x0: &[C64], y: &[C64]) -> Vector {
        let mut x = x0.to_vec();
        for (zj, &yj) in self.z.iter().zip(y) {
            vector::axpy(yj, zj, &mut x);
        }
        x
    }

    /// `||A Z - V Hbar||_F`
    pub fn relation_residual(&self, a: &dyn LinearOperator) -> f64 {
        let h = self.hbar();
        let mut acc = 0.0;
        for (j, zj) in self.z.iter().enumerate() {
            let mut d = a.apply(zj);
            for (i, vi) in self.v.iter().enumerate() {
                vector::axpy(-h[(i, j)], vi, &mut d);
            }
            acc += vector::norm(&d).powi(2);
        }
        acc.sqrt()
    }

    pub fn orthonormality_error(&self) -> f64 {
        vector::orthonormality_error(&self.v)
    }

    /// Appends `z` and the orthogonalized image `A z`.
    pub fn step_with_direction(&mut self, a: &dyn LinearOperator, z: Vector) -> Result<StepOutcome> {
        if !vector::is_finite(&z) {
            return Err(Error::NonFinite("search direction"));
        }
        let s = a.apply(&z);
        if !vector::is_finite(&s) {
            return Err(Error::NonFinite("operator application"));
        }
        let out = orthonormalize_against(&s, &self.v)?;
        let mut col = out.coeffs;
        col.push(C64::new(out.tail_norm, 0.0));
        self.z.push(z);
        self.h_cols.push(col);
        match out.unit_vector {
            Some(v) => {
                self.v.push(v);
                Ok(StepOutcome::Expanded)
            }
            None => {
                self.breakdown = true;
                Ok(StepOutcome::Breakdown)
            }
        }
    }
}

/// One Arnoldi step with `z_j = M_j^{-1} v_j`.
pub fn arnoldi_expand(
    state: &mut ArnoldiState,
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
) -> Result<StepOutcome> {
    let j = state.z.len();
    if j >= state.v.len() {
        return Err(Error::invalid("Arnoldi state has no unexpanded basis vector"));
    }
    let z = m.apply(&state.v[j]);
    if !vector::is_finite(&z) {
        return Err(Error::NonFinite("preconditioner"));
    }
    state.step_with_direction(a, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::operators::{CsrMatrix, Identity};
    use crate::vector::{from_real, unit};

    #[test]
    fn invariant_start_breaks_down() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        let mut st = ArnoldiState::from_residual(&unit(2, 0)).unwrap();
        let out = arnoldi_expand(&mut st, &a, &mut Identity::new(2)).unwrap();
        assert_eq!(out, StepOutcome::Breakdown);
        assert_eq!(st.h_cols[0], vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
    }

    #[test]
    fn swap_operator_moves_to_e2() {
        let a = CsrMatrix::from_triplets(2, &[(0, 1, c64(1.0, 0.0)), (1, 0, c64(1.0, 0.0))]).unwrap();
        let mut st = ArnoldiState::from_residual(&unit(2, 0)).unwrap();
        let out = arnoldi_expand(&mut st, &a, &mut Identity::new(2)).unwrap();
        assert_eq!(out, StepOutcome::Expanded);
        assert_eq!(st.h_cols[0], vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert_eq!(st.v[1], unit(2, 1));
    }

    #[test]
    fn non_finite_preconditioner_aborts() {
        let a = CsrMatrix::identity(2);
        let mut st = ArnoldiState::from_residual(&unit(2, 0)).unwrap();
        let mut bad = crate::operators::FnPreconditioner::new(2, |_: &[C64]| vec![c64(f64::NAN, 0.0); 2]);
        assert!(matches!(arnoldi_expand(&mut st, &a, &mut bad), Err(Error::NonFinite(_))));
    }
}
