use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Bound on the KKT residuals of an [`nnls_active_set`] solution: gradient
/// `Aᵀ(Ax − b)` at least `-KKT_TOLERANCE` on zero coordinates and at most
/// `KKT_TOLERANCE` in magnitude on positive ones.
pub const KKT_TOLERANCE: f64 = 1e-8;

// Dual entries at or below this never enter the passive set.
const ENTRY_TOLERANCE: f64 = 1e-11;

/// `argmin_{x ≥ 0} ‖A x − b‖₂` by the Lawson–Hanson active-set method.
///
/// `a` should have full column rank. The passive-set least-squares
/// subproblems are solved by SVD. Fails after `3 · ncols` inner iterations.
pub fn nnls_active_set(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares system"));
    }
    let max_iter = 3 * n;
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    // candidates whose unconstrained refit came out non-positive; retried
    // after x next moves
    let mut rejected = vec![false; n];
    let mut iterations = 0;

    loop {
        let w = dual(a, b, &x);
        let mut entering: Option<usize> = None;
        for j in 0..n {
            if passive[j] || rejected[j] || w[j] <= ENTRY_TOLERANCE {
                continue;
            }
            if entering.is_none_or(|e| w[j] > w[e]) {
                entering = Some(j);
            }
        }
        let Some(j) = entering else { break };
        passive[j] = true;

        let mut first = true;
        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::MaxIterationsExceeded(max_iter));
            }
            let z = solve_passive(a, b, &passive);
            if first && z[j] <= 0.0 {
                passive[j] = false;
                rejected[j] = true;
                break;
            }
            first = false;
            if (0..n).all(|i| !passive[i] || z[i] > 0.0) {
                x = z;
                rejected.iter_mut().for_each(|r| *r = false);
                break;
            }
            // move from x toward z until the first passive coordinate hits zero
            let mut alpha = f64::INFINITY;
            let mut leaving = 0;
            for i in (0..n).filter(|&i| passive[i] && z[i] <= 0.0) {
                let t = x[i] / (x[i] - z[i]);
                if t < alpha {
                    alpha = t;
                    leaving = i;
                }
            }
            for i in (0..n).filter(|&i| passive[i]) {
                x[i] += alpha * (z[i] - x[i]);
            }
            x[leaving] = 0.0;
            for i in 0..n {
                if passive[i] && x[i] <= 0.0 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            rejected.iter_mut().for_each(|r| *r = false);
        }
    }
    Ok(x)
}

// Aᵀ(b − A x)
fn dual(a: &DMatrix<f64>, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            linalg::axpy(-xj, linalg::column(a, j), &mut r);
        }
    }
    linalg::correlate(a, &r)
}

// Unconstrained least squares on the passive columns; zero elsewhere.
fn solve_passive(a: &DMatrix<f64>, b: &[f64], passive: &[bool]) -> Vec<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let mut sub = DMatrix::zeros(a.nrows(), cols.len());
    for (k, &j) in cols.iter().enumerate() {
        sub.column_mut(k).copy_from_slice(linalg::column(a, j));
    }
    let svd = sub.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    let sol = svd
        .solve(&DVector::from_column_slice(b), cutoff)
        .expect("SVD was computed with both factors");
    let mut z = vec![0.0; passive.len()];
    for (k, &j) in cols.iter().enumerate() {
        z[j] = sol[k];
    }
    z
}
