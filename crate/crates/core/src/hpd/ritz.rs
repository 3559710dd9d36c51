use crate::dense::{hermitian_eig, orthonormalize_against, DenseMatrix};
use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::vector::{self, Vector};
use crate::C64;

use super::LanczosRecord;

/// Ascending Ritz values with their unit Ritz vectors.
#[derive(Clone, Debug)]
pub struct RitzPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vector>,
}

/// Tridiagonal matrix of the Lanczos process implied by CG coefficients,
/// in the basis `r_j / ||r_j||`.
pub fn cg_tridiagonal(rec: &LanczosRecord) -> DenseMatrix {
    let m = rec.alpha.len().min(rec.vectors.len());
    let mut t = DenseMatrix::zeros(m, m);
    for j in 0..m {
        let mut d = 1.0 / rec.alpha[j];
        if j > 0 {
            d += rec.beta[j - 1] / rec.alpha[j - 1];
        }
        t[(j, j)] = C64::new(d, 0.0);
        if j + 1 < m {
            let off = -rec.beta[j].sqrt() / rec.alpha[j];
            t[(j + 1, j)] = C64::new(off, 0.0);
            t[(j, j + 1)] = C64::new(off, 0.0);
        }
    }
    t
}

/// The `k` smallest Ritz pairs from a recorded CG run.
pub fn lanczos_ritz(rec: &LanczosRecord, k: usize) -> Result<RitzPairs> {
    let m = rec.alpha.len().min(rec.vectors.len());
    if m < k || k == 0 {
        return Err(Error::HarvestTooSmall { needed: k.max(1), available: m });
    }
    let t = cg_tridiagonal(rec);
    let (vals, s) = hermitian_eig(&t)?;
    let n = rec.vectors[0].len();
    let vectors = (0..k)
        .map(|j| {
            let y = vector::combine(n, &rec.vectors[..m], s.col(j));
            let nrm = vector::norm(&y);
            vector::scaled(C64::new(1.0 / nrm, 0.0), &y)
        })
        .collect();
    Ok(RitzPairs { values: vals[..k].to_vec(), vectors })
}

/// The `k` smallest Ritz pairs of Hermitian `a` on `span(candidates)`.
pub fn rayleigh_ritz(a: &dyn LinearOperator, candidates: &[Vector], k: usize) -> Result<RitzPairs> {
    let mut q: Vec<Vector> = Vec::new();
    for c in candidates {
        let o = orthonormalize_against(c, &q)?;
        if o.tail_norm > 1e-10 * vector::norm(c) {
            if let Some(u) = o.unit_vector {
                q.push(u);
            }
        }
    }
    if q.len() < k || k == 0 {
        return Err(Error::HarvestTooSmall { needed: k.max(1), available: q.len() });
    }
    let aq: Vec<Vector> = q.iter().map(|v| a.apply(v)).collect();
    let h = DenseMatrix::from_fn(q.len(), q.len(), |i, j| vector::dot(&q[i], &aq[j]));
    let h = h.add(&h.adjoint()).scaled(C64::new(0.5, 0.0));
    let (vals, s) = hermitian_eig(&h)?;
    let n = q[0].len();
    let vectors = (0..k).map(|j| vector::combine(n, &q, s.col(j))).collect();
    Ok(RitzPairs { values: vals[..k].to_vec(), vectors })
}

/// Extreme Ritz values of `steps` Lanczos steps with full reorthogonalization.
pub(crate) fn lanczos_extremes(op: &dyn LinearOperator, start: &[C64], steps: usize) -> Result<(f64, f64)> {
    let nrm = vector::norm(start);
    if nrm == 0.0 {
        return Err(Error::Degenerate("Lanczos start vector vanished".into()));
    }
    let mut v = vec![vector::scaled(C64::new(1.0 / nrm, 0.0), start)];
    let mut cols: Vec<Vector> = Vec::new();
    for j in 0..steps {
        let w = op.apply(&v[j]);
        let o = orthonormalize_against(&w, &v)?;
        let mut col = o.coeffs;
        col.push(C64::new(o.tail_norm, 0.0));
        cols.push(col);
        match o.unit_vector {
            Some(u) => v.push(u),
            None => break,
        }
    }
    let m = cols.len();
    let t = DenseMatrix::from_fn(m, m, |i, j| cols[j].get(i).copied().unwrap_or_default());
    let t = t.add(&t.adjoint()).scaled(C64::new(0.5, 0.0));
    let (vals, _) = hermitian_eig(&t)?;
    Ok((vals[0], vals[m - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpd::{cg_solve, CgConfig};
    use crate::operators::CsrMatrix;
    use crate::vector::from_real;

    #[test]
    fn tridiagonal_reproduces_lanczos_relation() {
        let d: Vec<f64> = (1..=12).map(|i| f64::from(i).powi(2)).collect();
        let a = CsrMatrix::from_diagonal(&from_real(&d));
        let b = from_real(&[1.0; 12]);
        let rep = cg_solve(&a, &b, None, &CgConfig::new(1e-14, 6).with_lanczos(), None).unwrap();
        let rec = rep.lanczos.unwrap();
        let t = cg_tridiagonal(&rec);
        // A V = V T holds in every column but the last
        for j in 0..t.cols() - 1 {
            let av = a.apply(&rec.vectors[j]);
            let vt = vector::combine(12, &rec.vectors, t.col(j));
            assert!(vector::norm(&vector::sub(&av, &vt)) < 1e-10, "column {j}");
        }
    }

    #[test]
    fn rayleigh_ritz_on_invariant_span() {
        let a = CsrMatrix::from_diagonal(&from_real(&[5.0, 1.0, 3.0]));
        let pairs = rayleigh_ritz(&a, &[vector::unit(3, 1), vector::unit(3, 0)], 1).unwrap();
        assert!((pairs.values[0] - 1.0).abs() < 1e-14);
    }
}
