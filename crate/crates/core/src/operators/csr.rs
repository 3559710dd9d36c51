use super::LinearOperator;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::vector::{self, Vector};
use crate::C64;

/// Square compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<C64>,
    hermitian: bool,
}

impl CsrMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::invalid(format!("non-finite entry at ({i}, {j})")));
            }
        }
        let mut sorted: Vec<_> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<C64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_indices.push(j);
            values.push(v);
            row_offsets[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let mut m = Self { n, row_offsets, col_indices, values, hermitian: false };
        m.hermitian = m.check_hermitian();
        Ok(m)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let trips: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), &trips).expect("diagonal assembly")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        let mut trips = Vec::new();
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    trips.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.rows(), &trips)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        match self.col_indices[lo..hi].binary_search(&j) {
            Ok(p) => self.values[lo + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `(row, col, value)` for every stored entry, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for p in self.row_offsets[i]..self.row_offsets[i + 1] {
                out.push((i, self.col_indices[p], self.values[p]));
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vector {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Sparse row-wise product, rejecting length mismatches.
    pub fn try_apply(&self, x: &[C64]) -> Result<Vector> {
        crate::error::check_len(self.n, x.len())?;
        Ok(self.apply(x))
    }

    fn check_hermitian(&self) -> bool {
        let scale = vector::norm(&self.values).max(f64::MIN_POSITIVE);
        self.triplets()
            .into_iter()
            .all(|(i, j, v)| (self.get(j, i).conj() - v).norm() <= 1e-14 * scale)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64]) -> Vector {
        assert_eq!(x.len(), self.n, "csr apply: dimension mismatch");
        (0..self.n)
            .map(|i| {
                (self.row_offsets[i]..self.row_offsets[i + 1])
                    .map(|p| self.values[p] * x[self.col_indices[p]])
                    .sum()
            })
            .collect()
    }

    fn is_hermitian(&self) -> bool {
        self.hermitian
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::vector::from_real;

    #[test]
    fn identity_apply() {
        let y = CsrMatrix::identity(2).try_apply(&from_real(&[3.0, 4.0])).unwrap();
        assert_eq!(y, from_real(&[3.0, 4.0]));
    }

    #[test]
    fn diagonal_apply() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0]));
        assert_eq!(a.apply(&from_real(&[1.0, 1.0])), from_real(&[1.0, 2.0]));
        assert!(a.is_hermitian());
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, &[(0, 1, c64(1.0, 0.0)), (0, 1, c64(2.0, 0.0))]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 1), c64(3.0, 0.0));
        assert!(!a.is_hermitian());
    }

    #[test]
    fn dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(a.try_apply(&from_real(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn out_of_range_entry() {
        assert!(CsrMatrix::from_triplets(2, &[(2, 0, c64(1.0, 0.0))]).is_err());
    }
}
