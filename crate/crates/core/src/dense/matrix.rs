use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::vector::{self, Vector};
use crate::C64;

/// Small dense complex matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from column-major data, rejecting non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if !vector::is_finite(&data) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Row-major real literal, convenient in tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            m.data[j * rows..(j + 1) * rows].copy_from_slice(col);
        }
        m
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> Vector {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copy of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Writes `src` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &DenseMatrix) {
        for j in 0..src.cols {
            for i in 0..src.rows {
                self[(r0 + i, c0 + j)] = src[(i, j)];
            }
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = j * self.rows;
            for p in 0..self.cols {
                let b = other[(p, j)];
                if b == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = self.col(p);
                for i in 0..self.rows {
                    out.data[dst + i] += src[i] * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vector {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        let mut y = vector::zeros(self.rows);
        for (j, &xj) in x.iter().enumerate() {
            if xj != C64::new(0.0, 0.0) {
                vector::axpy(xj, self.col(j), &mut y);
            }
        }
        y
    }

    /// `self^H x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vector {
        assert_eq!(self.rows, x.len(), "adjoint_mul_vec shape mismatch");
        (0..self.cols).map(|j| vector::dot(self.col(j), x)).collect()
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: vector::sub(&self.data, &other.data) }
    }

    pub fn add(&self, other: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: vector::add(&self.data, &other.data) }
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: vector::scaled(alpha, &self.data) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        vector::norm(&self.data)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        vector::is_finite(&self.data)
    }

    /// Frobenius distance to the Hermitian part, relative to the norm.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        self.sub(&self.adjoint()).frobenius_norm() / scale
    }

    pub fn resize(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn column_major_layout() {
        let m = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(m.as_slice(), &[c64(1.0, 0.0), c64(3.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0)]);
        assert_eq!(m.trace(), c64(5.0, 0.0));
    }

    #[test]
    fn matmul_against_manual_product() {
        let a = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let c = a.matmul(&b);
        assert_eq!(c, DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[4.0, 3.0]]));
    }

    #[test]
    fn rejects_non_finite() {
        let err = DenseMatrix::from_col_major(1, 1, vec![c64(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }
}
