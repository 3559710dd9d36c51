use crate::error::{check_len, Error, Result};
use crate::operators::LinearOperator;
use crate::vector::{self, Vector};
use crate::C64;

/// `A (I + u_1 w_1^H) ... (I + u_k w_k^H)` applied as rank-one updates.
pub struct TranslatedOperator<'a> {
    a: &'a dyn LinearOperator,
    u: Vec<Vector>,
    w: Vec<Vector>,
}

impl LinearOperator for TranslatedOperator<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply(&self, x: &[C64]) -> Vector {
        let mut y = x.to_vec();
        for (u, w) in self.u.iter().zip(&self.w).rev() {
            let s = vector::dot(w, &y);
            vector::axpy(s, u, &mut y);
        }
        self.a.apply(&y)
    }
}

pub fn spectral_translation<'a>(
    a: &'a dyn LinearOperator,
    u: Vec<Vector>,
    w: Vec<Vector>,
) -> Result<TranslatedOperator<'a>> {
    if u.len() != w.len() {
        return Err(Error::invalid("translation needs paired right and left vectors"));
    }
    for v in u.iter().chain(&w) {
        check_len(a.dim(), v.len())?;
        if !vector::is_finite(v) {
            return Err(Error::NonFinite("translation vectors"));
        }
    }
    Ok(TranslatedOperator { a, u, w })
}

/// Left factor `w` moving the eigenvalue `lambda` with right vector `u` and
/// left vector `left` to `target`: `1 + w^H u = target / lambda`.
pub fn translation_vector(lambda: C64, target: C64, u: &[C64], left: &[C64]) -> Result<Vector> {
    check_len(u.len(), left.len())?;
    let s = vector::dot(left, u);
    if s.norm() <= 1e-14 * vector::norm(left) * vector::norm(u) || lambda.norm() == 0.0 {
        return Err(Error::invalid("left and right vectors are orthogonal or lambda is zero"));
    }
    let factor = (target / lambda - 1.0).conj() / s.conj();
    Ok(vector::scaled(factor, left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::operators::CsrMatrix;
    use crate::vector::{from_real, unit};

    #[test]
    fn translates_first_eigenvalue() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        let t = spectral_translation(&a, vec![unit(2, 0)], vec![unit(2, 0)]).unwrap();
        let d = t.to_dense();
        assert!((d[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-15);
        assert!((d[(1, 1)] - c64(2.0, 0.0)).norm() < 1e-15);
        assert!(d[(0, 1)].norm() < 1e-15 && d[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn empty_translation_is_identity_map() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 3.0]));
        let t = spectral_translation(&a, vec![], vec![]).unwrap();
        assert_eq!(t.apply(&from_real(&[1.0, 1.0])), from_real(&[1.0, 3.0]));
    }

    #[test]
    fn weight_hits_target() {
        let u = from_real(&[1.0, 1.0]);
        let left = from_real(&[0.5, 0.0]);
        let w = translation_vector(c64(0.5, 0.0), c64(3.0, 0.0), &u, &left).unwrap();
        let got = c64(1.0, 0.0) + vector::dot(&w, &u);
        assert!((got - c64(6.0, 0.0)).norm() < 1e-14);
    }
}
