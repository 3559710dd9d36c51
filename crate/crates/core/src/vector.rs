//! Level-1 kernels on complex slices.
//!
//! `dot(a, b)` is conjugate-linear in its first argument, i.e. `a^H b`.

use crate::C64;

pub type Vector = Vec<C64>;

#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[C64]) -> f64 {
    // scaled accumulation so that tiny or huge entries do not under/overflow
    let scale = a.iter().fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return if scale.is_nan() { f64::NAN } else { scale };
    }
    let ssq: f64 = a
        .iter()
        .map(|z| {
            let (re, im) = (z.re / scale, z.im / scale);
            re * re + im * im
        })
        .sum();
    scale * ssq.sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale(alpha: C64, x: &mut [C64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn scaled(alpha: C64, x: &[C64]) -> Vector {
    x.iter().map(|v| alpha * v).collect()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[C64], b: &[C64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn zeros(n: usize) -> Vector {
    vec![C64::new(0.0, 0.0); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut e = zeros(n);
    e[i] = C64::new(1.0, 0.0);
    e
}

pub fn from_real(values: &[f64]) -> Vector {
    values.iter().map(|&v| C64::new(v, 0.0)).collect()
}

pub fn is_finite(x: &[C64]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `basis^H x` for a list of columns.
pub fn adjoint_times(basis: &[Vector], x: &[C64]) -> Vector {
    basis.iter().map(|col| dot(col, x)).collect()
}

/// `basis * coeffs` for a list of columns of length `n`.
pub fn combine(n: usize, basis: &[Vector], coeffs: &[C64]) -> Vector {
    debug_assert_eq!(basis.len(), coeffs.len());
    let mut out = zeros(n);
    for (col, &c) in basis.iter().zip(coeffs) {
        axpy(c, col, &mut out);
    }
    out
}

/// Largest absolute deviation of `basis^H basis` from the identity, measured in Frobenius norm.
pub fn orthonormality_error(basis: &[Vector]) -> f64 {
    let mut acc = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (dot(a, b) - target).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Frobenius norm of a list of columns.
pub fn frobenius(basis: &[Vector]) -> f64 {
    basis.iter().map(|c| norm(c).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn dot_conjugates_first_argument() {
        let a = vec![c64(0.0, 1.0)];
        let b = vec![c64(0.0, 1.0)];
        assert_eq!(dot(&a, &b), c64(1.0, 0.0));
    }

    #[test]
    fn norm_handles_extreme_scales() {
        let x = vec![c64(3e200, 0.0), c64(0.0, 4e200)];
        assert!((norm(&x) / 5e200 - 1.0).abs() < 1e-15);
        let y = vec![c64(3e-200, 0.0), c64(4e-200, 0.0)];
        assert!((norm(&y) / 5e-200 - 1.0).abs() < 1e-15);
        assert_eq!(norm(&zeros(3)), 0.0);
    }
}
