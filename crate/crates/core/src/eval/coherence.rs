//! Mutual coherence and the ECDF of pairwise coherences.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// `|⟨w_i, w_j⟩| / (‖w_i‖ ‖w_j‖)` for every unordered pair `i < j`, in
/// row-major pair order, clamped to `[0, 1]`. Columns are normalized inside
/// the computation; the input is untouched.
pub fn pairwise_coherences(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.ncols();
    if n < 2 {
        return Err(Error::TooFewColumns);
    }
    let mut unit = m.clone();
    if let Some(&column) = linalg::normalize_columns(&mut unit).first() {
        return Err(Error::ZeroColumn { column });
    }
    let gram = unit.tr_mul(&unit);
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(gram[(i, j)].abs().min(1.0));
        }
    }
    Ok(out)
}

/// Largest normalized inner product between two distinct columns.
pub fn coherence(m: &DMatrix<f64>) -> Result<f64> {
    Ok(pairwise_coherences(m)?.into_iter().fold(0.0, f64::max))
}

/// `n` evenly spaced points on `[0, 1]`, both ends included.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Fraction of column pairs with coherence `≤ t` for each `t` in `grid`.
pub fn coherence_ecdf(m: &DMatrix<f64>, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut mu = pairwise_coherences(m)?;
    mu.sort_by(f64::total_cmp);
    let total = mu.len() as f64;
    Ok(grid.iter().map(|&t| (t, mu.partition_point(|&v| v <= t) as f64 / total)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_and_duplicate() {
        let eye = DMatrix::<f64>::identity(4, 4);
        assert_eq!(coherence(&eye).unwrap(), 0.0);
        assert!(coherence_ecdf(&eye, &uniform_grid(11)).unwrap().iter().all(|&(_, f)| f == 1.0));

        let dup = DMatrix::from_column_slice(2, 3, &[1.0, 2.0, 1.0, 2.0, 0.0, 1.0]);
        assert!((coherence(&dup).unwrap() - 1.0).abs() < 1e-12);

        let same = DMatrix::from_element(3, 4, 0.7);
        let e = coherence_ecdf(&same, &[0.0, 0.5, 0.999, 1.0]).unwrap();
        assert_eq!(e.iter().map(|p| p.1).collect::<Vec<_>>(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn input_is_not_modified() {
        let m = DMatrix::from_column_slice(2, 3, &[3.0, 4.0, 1.0, 0.0, 0.0, 2.0]);
        let before = m.clone();
        assert!((coherence(&m).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(m, before);
    }

    #[test]
    fn errors() {
        assert!(matches!(coherence(&DMatrix::from_element(3, 1, 1.0)), Err(Error::TooFewColumns)));
        let m = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(coherence(&m), Err(Error::ZeroColumn { column: 1 })));
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(200);
        assert_eq!((g[0], g[199], g.len()), (0.0, 1.0, 200));
    }
}
