//! Small dense kernels shared by the solvers and the network.
//!
//! Every score, coefficient and norm in the crate goes through [`dot`], so two
//! code paths that perform the same arithmetic produce the same bits.

use nalgebra::DMatrix;

/// Sequential left-to-right inner product.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Column `j` of a column-major matrix as a contiguous slice.
#[inline]
pub fn column(m: &DMatrix<f64>, j: usize) -> &[f64] {
    let rows = m.nrows();
    &m.as_slice()[j * rows..(j + 1) * rows]
}

/// `mᵀ r`, one [`dot`] per column.
pub fn correlate(m: &DMatrix<f64>, r: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.nrows(), r.len());
    m.as_slice().chunks_exact(m.nrows()).map(|col| dot(col, r)).collect()
}

/// `y ← y + alpha · x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Replaces every entry by its absolute value and scales each nonzero column
/// to unit Euclidean norm. Zero columns are left as they are.
pub fn abs_normalize_columns(mut m: DMatrix<f64>) -> DMatrix<f64> {
    m.apply(|v| *v = v.abs());
    normalize_columns(&mut m);
    m
}

/// Scales each nonzero column to unit norm in place; returns the indices of
/// columns that were zero.
pub fn normalize_columns(m: &mut DMatrix<f64>) -> Vec<usize> {
    let rows = m.nrows();
    let mut zero = Vec::new();
    for (j, col) in m.as_mut_slice().chunks_exact_mut(rows.max(1)).enumerate() {
        let n = norm(col);
        if n > 0.0 {
            col.iter_mut().for_each(|v| *v /= n);
        } else {
            zero.push(j);
        }
    }
    zero
}
