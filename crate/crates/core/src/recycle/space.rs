use std::io::{Read, Write};
use std::path::Path;

use crate::dense::{orthonormalize_against, DenseMatrix, Lu};
use crate::error::{Error, Result};
use crate::gmres::ArnoldiState;
use crate::operators::LinearOperator;
use crate::vector::{self, Vector};
use crate::C64;

use super::harmonic::HarmonicRitz;

const MAGIC: &[u8; 8] = b"KRYRCY01";

/// Compressed relation `A Z_k = V_{k+1} Hbar_k` carried between cycles and systems.
#[derive(Clone, Debug, PartialEq)]
pub struct RecycleSpace {
    pub z: Vec<Vector>,
    pub v: Vec<Vector>,
    pub hbar: DenseMatrix,
    pub theta: Vec<C64>,
}

impl RecycleSpace {
    pub fn k(&self) -> usize {
        self.z.len()
    }

    pub fn n(&self) -> usize {
        self.v.first().map_or(0, Vec::len)
    }

    /// `||A Z_k - V_{k+1} Hbar_k||_F`
    pub fn relation_residual(&self, a: &dyn LinearOperator) -> f64 {
        let mut acc = 0.0;
        for (j, zj) in self.z.iter().enumerate() {
            let mut d = a.apply(zj);
            for (i, vi) in self.v.iter().enumerate() {
                vector::axpy(-self.hbar[(i, j)], vi, &mut d);
            }
            acc += vector::norm(&d).powi(2);
        }
        acc.sqrt()
    }

    pub fn orthonormality_error(&self) -> f64 {
        vector::orthonormality_error(&self.v)
    }

    pub fn z_norm(&self) -> f64 {
        vector::frobenius(&self.z)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (n, k) = (self.n() as u64, self.k() as u64);
        let mut out = Vec::with_capacity(24 + 16 * (self.n() * (2 * self.k() + 1) + (self.k() + 2) * self.k()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&n.to_le_bytes());
        out.extend_from_slice(&k.to_le_bytes());
        let mut put = |x: &C64| {
            out.extend_from_slice(&x.re.to_le_bytes());
            out.extend_from_slice(&x.im.to_le_bytes());
        };
        self.z.iter().flatten().for_each(&mut put);
        self.v.iter().flatten().for_each(&mut put);
        self.hbar.as_slice().iter().for_each(&mut put);
        self.theta.iter().for_each(&mut put);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::UnsupportedFormat(format!("recycle container: {msg}"));
        if bytes.len() < 24 || &bytes[..8] != MAGIC {
            return Err(bad("missing magic header"));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        let (n, k) = (word(8) as usize, word(16) as usize);
        let count = n
            .checked_mul(2 * k + 1)
            .and_then(|a| a.checked_add((k + 2) * k))
            .ok_or_else(|| bad("dimensions overflow"))?;
        if bytes.len() != 24 + 16 * count {
            return Err(bad("payload length does not match dimensions"));
        }
        let mut vals = bytes[24..].chunks_exact(16).map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        });
        let mut take = |len: usize| -> Vector { vals.by_ref().take(len).collect() };
        let z = (0..k).map(|_| take(n)).collect();
        let v = (0..k + 1).map(|_| take(n)).collect();
        let hbar = DenseMatrix::from_col_major(k + 1, k, take((k + 1) * k))?;
        let theta = take(k);
        if !theta.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("recycle container"));
        }
        Ok(Self { z, v, hbar, theta })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::File::create(path)?.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }
}

/// Result of compressing a cycle onto its harmonic Ritz directions.
#[derive(Clone, Debug)]
pub struct Compressed {
    pub space: RecycleSpace,
    /// `Q^H (c - Hbar y)`: the cycle residual in the new `V_{k+1}` basis.
    pub residual_coords: Vector,
    /// Harmonic directions dropped as numerically dependent.
    pub dropped: usize,
}

/// Compresses a completed cycle to `A Z_k = V_{k+1} Hbar_k` using the QR of
/// `[[P_k; 0], c - Hbar y]`.
pub fn dr_compress(state: &ArnoldiState, hr: &HarmonicRitz, y: &[C64]) -> Result<Compressed> {
    let l = state.dim();
    if hr.p.rows() != l || y.len() != l {
        return Err(Error::invalid("harmonic vectors and minimizer must match the cycle dimension"));
    }
    let rows = state.v.len();
    let hbar = state.hbar();
    let resid = vector::sub(&state.rhs(), &hbar.mul_vec(y));

    // orthonormal Q over l+1 coordinates; the last row is zero for P_k
    let mut q: Vec<Vector> = Vec::new();
    let mut kept = Vec::new();
    for j in 0..hr.k() {
        let mut col = hr.p.col(j).to_vec();
        col.push(C64::new(0.0, 0.0));
        let o = orthonormalize_against(&col, &q)?;
        if o.tail_norm > 1e-10 * vector::norm(&col) {
            q.push(o.unit_vector.expect("tail above threshold"));
            kept.push(j);
        }
    }
    let k = q.len();
    let mut last = residual_direction(&hbar, l).unwrap_or_else(|| resid.clone());
    last.resize(l + 1, C64::new(0.0, 0.0));
    if rows == l + 1 {
        let o = orthonormalize_against(&last, &q)?;
        let scale = vector::norm(&state.c).max(f64::MIN_POSITIVE);
        match o.unit_vector {
            Some(u) if o.tail_norm > 1e-13 * scale => q.push(u),
            _ => q.push(complement_unit(&q, l + 1)?),
        }
    } else {
        // invariant cycle: H P = P Theta, so no residual direction is needed
        q.push(vector::unit(l + 1, l));
    }

    let qk = DenseMatrix::from_columns(l + 1, &q[..k]);
    let qk_top = qk.block(0, l, 0, k);
    let z = (0..k).map(|j| vector::combine(state.n(), &state.z, qk_top.col(j))).collect();
    let mut v: Vec<Vector> = if rows == l + 1 {
        q.iter().map(|qj| vector::combine(state.n(), &state.v, qj)).collect()
    } else {
        // happy breakdown: no v_{l+1}, the last coordinate is unused
        q[..k].iter().map(|qj| vector::combine(state.n(), &state.v, &qj[..l])).collect()
    };
    if v.len() == k {
        v.push(complement_vector(&v, state.n())?);
    }
    let mut hfull = DenseMatrix::zeros(l + 1, l);
    hfull.set_block(0, 0, &hbar);
    let qall = DenseMatrix::from_columns(l + 1, &q);
    let hk = qall.adjoint().matmul(&hfull).matmul(&qk_top);
    let mut resid_full = resid;
    resid_full.resize(l + 1, C64::new(0.0, 0.0));
    let residual_coords = qall.adjoint_mul_vec(&resid_full);
    let theta = kept.iter().map(|&j| hr.theta[j]).collect();
    Ok(Compressed { space: RecycleSpace { z, v, hbar: hk, theta }, residual_coords, dropped: hr.k() - k })
}

/// Largest relative distance from `range([V P, r])` to `range(V_{k+1})`.
/// The residual column is measured against `||c||`, the accuracy to which
/// `c - Hbar y` is known.
pub fn range_defect(state: &ArnoldiState, hr: &HarmonicRitz, y: &[C64], space: &RecycleSpace) -> f64 {
    let n = state.n();
    let l = state.dim();
    let resid = vector::sub(&state.rhs(), &state.hbar().mul_vec(y));
    let mut cols: Vec<(Vector, f64)> =
        (0..hr.k()).map(|j| (vector::combine(n, &state.v[..l], hr.p.col(j)), 0.0)).collect();
    cols.push((vector::combine(n, &state.v, &resid), vector::norm(&state.c)));
    cols.iter()
        .map(|(c, floor)| {
            let nrm = vector::norm(c).max(*floor);
            if nrm == 0.0 {
                return 0.0;
            }
            let mut d = c.clone();
            for vi in &space.v {
                let h = vector::dot(vi, &d);
                vector::axpy(-h, vi, &mut d);
            }
            vector::norm(&d) / nrm
        })
        .fold(0.0, f64::max)
}

// Null vector [-conj(h) H^{-H} e_l; 1] of Hbar^H. The least-squares residual
// is parallel to it, but computing it as c - Hbar y loses the direction once
// the residual is small relative to c.
fn residual_direction(hbar: &DenseMatrix, l: usize) -> Option<Vector> {
    if hbar.rows() != l + 1 || l == 0 {
        return None;
    }
    let lu = Lu::factor(&hbar.block(0, l, 0, l).adjoint()).ok()?;
    let mut w = lu.solve_vec(&vector::unit(l, l - 1));
    let h = hbar[(l, l - 1)].conj();
    w.iter_mut().for_each(|x| *x *= -h);
    w.push(C64::new(1.0, 0.0));
    vector::is_finite(&w).then_some(w)
}

fn complement_unit(q: &[Vector], dim: usize) -> Result<Vector> {
    for i in (0..dim).rev() {
        let o = orthonormalize_against(&vector::unit(dim, i), q)?;
        if o.tail_norm > 0.5 {
            return Ok(o.unit_vector.expect("tail above threshold"));
        }
    }
    Err(Error::Degenerate("no complement direction available".into()))
}

fn complement_vector(v: &[Vector], n: usize) -> Result<Vector> {
    for i in 0..n {
        let o = orthonormalize_against(&vector::unit(n, i), v)?;
        if o.tail_norm > 0.5 {
            return Ok(o.unit_vector.expect("tail above threshold"));
        }
    }
    Err(Error::Degenerate("recycle space already spans the whole space".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn container_round_trip() {
        let s = RecycleSpace {
            z: vec![vec![c64(1.0, 2.0), c64(3.0, -4.0)]],
            v: vec![vec![c64(1.0, 0.0), c64(0.0, 0.0)], vec![c64(0.0, 0.0), c64(0.0, 1.0)]],
            hbar: DenseMatrix::from_col_major(2, 1, vec![c64(0.5, 0.25), c64(-1.0, 1e-300)]).unwrap(),
            theta: vec![c64(0.125, -7.0)],
        };
        assert_eq!(RecycleSpace::from_bytes(&s.to_bytes()).unwrap(), s);
    }

    #[test]
    fn container_rejects_garbage() {
        assert!(RecycleSpace::from_bytes(b"not a container at all..").is_err());
        let mut bytes = RecycleSpace {
            z: vec![],
            v: vec![vec![c64(1.0, 0.0)]],
            hbar: DenseMatrix::zeros(1, 0),
            theta: vec![],
        }
        .to_bytes();
        bytes.push(0);
        assert!(RecycleSpace::from_bytes(&bytes).is_err());
    }
}
