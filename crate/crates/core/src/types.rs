use std::collections::BTreeSet;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;

/// A finite real vector of length `signal_dim`; also used for residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Signal(values))
    }

    pub fn zeros(len: usize) -> Self {
        Signal(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Signal::new(self.0.iter().map(|v| v * c).collect())
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Signal(values)
    }
}

/// Atom indices in the order a pursuit selected them. Repeats are allowed,
/// since plain matching pursuit can pick the same atom twice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn new(indices: Vec<usize>) -> Self {
        SupportSet(indices)
    }

    /// Like [`SupportSet::new`] but checks every index against `num_atoms`.
    pub fn checked(indices: Vec<usize>, num_atoms: usize) -> Result<Self> {
        if let Some(&index) = indices.iter().find(|&&i| i >= num_atoms) {
            return Err(Error::IndexOutOfRange { index, num_atoms });
        }
        Ok(SupportSet(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn distinct(&self) -> BTreeSet<usize> {
        self.0.iter().copied().collect()
    }

    pub fn has_repeats(&self) -> bool {
        self.distinct().len() != self.0.len()
    }

    pub(crate) fn push(&mut self, index: usize) {
        self.0.push(index);
    }
}

impl FromIterator<usize> for SupportSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SupportSet(iter.into_iter().collect())
    }
}

/// A dense non-negative coefficient vector of length `num_atoms`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCode(Vec<f64>);

impl SparseCode {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        for (index, &value) in coefficients.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite("sparse code"));
            }
            if value < 0.0 {
                return Err(Error::NegativeCoefficient { index, value });
            }
        }
        Ok(SparseCode(coefficients))
    }

    pub fn zeros(num_atoms: usize) -> Self {
        SparseCode(vec![0.0; num_atoms])
    }

    /// Builds a code from `(atom, coefficient)` pairs; repeated atoms add up.
    pub fn from_entries(num_atoms: usize, entries: &[(usize, f64)]) -> Result<Self> {
        let mut x = vec![0.0; num_atoms];
        for &(index, value) in entries {
            if index >= num_atoms {
                return Err(Error::IndexOutOfRange { index, num_atoms });
            }
            x[index] += value;
        }
        SparseCode::new(x)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.iter().filter(|&&v| v != 0.0).count()
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        SparseCode(values)
    }
}

/// A noiseless mixture `y = Σ a_l φ_{i_l}` with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub signal: Signal,
    pub true_support: SupportSet,
    pub true_coeffs: Vec<f64>,
}

impl Sample {
    /// Synthesizes the mixture from distinct atoms and positive coefficients.
    /// The sum runs in the order given.
    pub fn from_mixture(dict: &Dictionary, support: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        if support.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: support.len(), found: coeffs.len() });
        }
        if support.is_empty() {
            return Err(Error::ZeroSparsity);
        }
        let support = SupportSet::checked(support, dict.num_atoms())?;
        if support.has_repeats() {
            return Err(Error::InvalidArgument("mixture atoms must be distinct".into()));
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, &c)| !(c > 0.0 && c.is_finite())) {
            return Err(Error::NegativeCoefficient { index, value });
        }
        let mut y = vec![0.0; dict.signal_dim()];
        for (&i, &a) in support.indices().iter().zip(&coeffs) {
            linalg::axpy(a, dict.atom(i), &mut y);
        }
        Ok(Sample { signal: Signal::new(y)?, true_support: support, true_coeffs: coeffs })
    }

    pub fn sparsity(&self) -> usize {
        self.true_support.len()
    }

    /// Ground truth as a dense code.
    pub fn true_code(&self, num_atoms: usize) -> Result<SparseCode> {
        let entries: Vec<_> = self.true_support.indices().iter().copied().zip(self.true_coeffs.iter().copied()).collect();
        SparseCode::from_entries(num_atoms, &entries)
    }
}
