//! Independent dense oracles built on nalgebra.
#![allow(dead_code)]

use augdef::dense::DenseMatrix;
use augdef::operators::LinearOperator;
use augdef::vector::Vector;
use augdef::C64;
use nalgebra::{DMatrix, DVector};

pub fn to_na(m: &DenseMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn cols_to_na(n: usize, cols: &[Vector]) -> DMatrix<C64> {
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

pub fn vec_to_na(x: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(x)
}

pub fn op_to_na(a: &dyn LinearOperator) -> DMatrix<C64> {
    to_na(&a.to_dense())
}

/// Dense LU solve.
pub fn direct_solve(a: &dyn LinearOperator, b: &[C64]) -> Vector {
    let x = op_to_na(a).lu().solve(&vec_to_na(b)).expect("nonsingular");
    x.iter().copied().collect()
}

/// 2-norm condition number from the singular values.
pub fn cond2(a: &dyn LinearOperator) -> f64 {
    let s = op_to_na(a).singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Ascending eigenvalues of a Hermitian operator.
pub fn hermitian_eigenvalues(a: &dyn LinearOperator) -> Vec<f64> {
    let m = op_to_na(a);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Numerical rank from singular values above `tol * sigma_max`.
pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let s = m.singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > tol * max).count()
}

pub fn rel_diff(x: &[C64], y: &[C64]) -> f64 {
    let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let n: f64 = y.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    d / n.max(f64::MIN_POSITIVE)
}
