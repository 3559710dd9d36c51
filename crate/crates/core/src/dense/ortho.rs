use crate::error::{Error, Result};
use crate::vector::{self, Vector};
use crate::C64;

/// Remainder is treated as zero below this fraction of the input norm.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// A second Gram-Schmidt pass runs when the remainder falls below this fraction of the input.
const REORTH_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug)]
pub struct Orthonormalized {
    pub coeffs: Vector,
    pub tail_norm: f64,
    /// Normalized remainder; `None` on breakdown.
    pub unit_vector: Option<Vector>,
}

/// Modified Gram-Schmidt of `v` against the orthonormal columns of `basis`,
/// with one conditional reorthogonalization pass.
pub fn orthonormalize_against(v: &[C64], basis: &[Vector]) -> Result<Orthonormalized> {
    if !vector::is_finite(v) {
        return Err(Error::invalid("orthonormalize_against: non-finite vector"));
    }
    let input_norm = vector::norm(v);
    let mut w = v.to_vec();
    let mut coeffs = vector::zeros(basis.len());
    let mut tail = mgs_pass(&mut w, basis, &mut coeffs);
    if tail < REORTH_RATIO * input_norm && !basis.is_empty() {
        tail = mgs_pass(&mut w, basis, &mut coeffs);
    }
    let unit_vector = if tail <= BREAKDOWN_TOL * input_norm || tail == 0.0 {
        None
    } else {
        vector::scale(C64::new(1.0 / tail, 0.0), &mut w);
        Some(w)
    };
    Ok(Orthonormalized { coeffs, tail_norm: tail, unit_vector })
}

fn mgs_pass(w: &mut [C64], basis: &[Vector], coeffs: &mut [C64]) -> f64 {
    for (q, c) in basis.iter().zip(coeffs.iter_mut()) {
        let h = vector::dot(q, w);
        vector::axpy(-h, q, w);
        *c += h;
    }
    vector::norm(w)
}
