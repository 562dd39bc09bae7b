use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::types::{Sample, SparseCode, SupportSet};

/// Fraction of ground-truth atoms present in the acquired support,
/// `|distinct(acquired) ∩ truth| / k`. Repeated selections count once.
pub fn hamming_complement(acquired: &SupportSet, truth: &SupportSet, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroSparsity);
    }
    let truth = truth.distinct();
    if truth.len() != k {
        return Err(Error::InvalidArgument(format!("ground truth has {} distinct atoms, expected {k}", truth.len())));
    }
    let hits = acquired.distinct().intersection(&truth).count();
    Ok(hits as f64 / k as f64)
}

/// `Σ_n (1 − |a(n) − g(n)| / k)` over indicator vectors of length
/// `num_atoms`, kept for auditing; it is not confined to `[0, 1]`.
pub fn hamming_complement_raw(acquired: &SupportSet, truth: &SupportSet, k: usize, num_atoms: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroSparsity);
    }
    let a = acquired.distinct();
    let g = truth.distinct();
    let differing = a.symmetric_difference(&g).count();
    Ok(num_atoms as f64 - differing as f64 / k as f64)
}

/// `‖y − Φx‖₂ / ‖y‖₂` for one sample.
pub fn relative_error(dict: &Dictionary, y: &[f64], code: &SparseCode) -> Result<f64> {
    let denom = linalg::norm(y);
    if denom == 0.0 {
        return Err(Error::ZeroSignal { index: 0 });
    }
    let approx = dict.synthesize(code)?;
    let diff: Vec<f64> = y.iter().zip(approx.as_slice()).map(|(a, b)| a - b).collect();
    Ok(linalg::norm(&diff) / denom)
}

/// Mean relative reconstruction error over aligned samples and codes.
pub fn epsilon_error(dict: &Dictionary, samples: &[Sample], codes: &[SparseCode]) -> Result<f64> {
    if samples.len() != codes.len() {
        return Err(Error::DimensionMismatch { expected: samples.len(), found: codes.len() });
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut total = 0.0;
    for (index, (s, c)) in samples.iter().zip(codes).enumerate() {
        total += relative_error(dict, s.signal.as_slice(), c).map_err(|e| match e {
            Error::ZeroSignal { .. } => Error::ZeroSignal { index },
            other => other,
        })?;
    }
    Ok(total / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn s(v: &[usize]) -> SupportSet {
        SupportSet::new(v.to_vec())
    }

    #[test]
    fn hamming_cases() {
        assert_eq!(hamming_complement(&s(&[4, 2, 9]), &s(&[2, 4, 9]), 3).unwrap(), 1.0);
        assert_eq!(hamming_complement(&s(&[0, 5]), &s(&[1, 2]), 2).unwrap(), 0.0);
        assert_eq!(hamming_complement(&s(&[1, 2, 7]), &s(&[1, 2, 3]), 3).unwrap(), 2.0 / 3.0);
        // a re-selected atom does not count twice
        assert_eq!(hamming_complement(&s(&[1, 1, 1]), &s(&[1, 2, 3]), 3).unwrap(), 1.0 / 3.0);
        assert_eq!(hamming_complement(&s(&[]), &s(&[1, 2]), 2).unwrap(), 0.0);
        assert!(matches!(hamming_complement(&s(&[]), &s(&[]), 0), Err(Error::ZeroSparsity)));
        assert!(hamming_complement(&s(&[1]), &s(&[1, 1]), 2).is_err());
    }

    #[test]
    fn raw_sum_counts_disagreements() {
        // N = 10, k = 3, two disagreeing coordinates on each side
        let raw = hamming_complement_raw(&s(&[1, 2, 7]), &s(&[1, 2, 3]), 3, 10).unwrap();
        assert!((raw - (10.0 - 2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn epsilon_cases() {
        let d = Dictionary::new(DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.0, 1.0, 0.6, 0.8])).unwrap();
        let sample = Sample::from_mixture(&d, vec![2, 0], vec![0.5, 0.5]).unwrap();
        let truth = sample.true_code(3).unwrap();
        assert!(epsilon_error(&d, std::slice::from_ref(&sample), &[truth]).unwrap() < 1e-12);
        assert_eq!(epsilon_error(&d, std::slice::from_ref(&sample), &[SparseCode::zeros(3)]).unwrap(), 1.0);
        // y = (0.8, 0.4); x = e_1 · 0.4 leaves (0.8, 0) → 0.8 / √0.8
        let code = SparseCode::from_entries(3, &[(1, 0.4)]).unwrap();
        let e = epsilon_error(&d, std::slice::from_ref(&sample), &[code]).unwrap();
        assert!((e - 0.8 / 0.8f64.sqrt()).abs() < 1e-12, "{e}");
        assert!(epsilon_error(&d, &[sample], &[]).is_err());
    }
}
