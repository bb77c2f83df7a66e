//! Dense complex vectors and matrices plus the handful of helpers the other
//! modules share.

use nalgebra::{DMatrix, DVector};

use crate::modfield::C64;

/// A `dim × dim` complex operator.
pub type Matrix = DMatrix<C64>;
/// A complex state vector.
pub type StateVector = DVector<C64>;

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> Matrix {
    Matrix::zeros(dim, dim)
}

/// `|u⟩⟨v|`
pub fn outer(u: &StateVector, v: &StateVector) -> Matrix {
    u * v.adjoint()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &Matrix, b: &Matrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &StateVector, b: &StateVector) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `A - A†`.
pub fn hermiticity_defect(a: &Matrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// `⟨u|v⟩`
pub fn inner(u: &StateVector, v: &StateVector) -> C64 {
    u.dotc(v)
}
