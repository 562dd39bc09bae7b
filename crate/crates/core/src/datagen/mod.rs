//! Synthetic dictionaries and non-negative sparse mixtures.
//!
//! All randomness comes from `ChaCha8Rng` seeded through [`derive_seed`], so a
//! master seed pins every dataset bit-for-bit on every platform.

mod dataset;
mod raman;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::types::Sample;

pub use dataset::{format_sample_row, parse_sample_row, write_dataset, DatasetMeta, ShardFiles, COEFFICIENT_LAW};
pub use raman::{generate_raman_surrogate, generate_raman_surrogate_with, load_raman_library, surrogate_atoms, RamanLibrary, SurrogateConfig};

pub type Rng64 = ChaCha8Rng;

/// Redraws allowed for a column that projects to all zeros.
pub const MAX_COLUMN_REDRAWS: usize = 100;

pub const DEFAULT_SHARD_SIZE: usize = 4096;

/// Mixes a stream id into a seed (SplitMix64 finalizer), giving independent
/// seeds for shards, epochs and splits.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// I.i.d. standard normal entries, clamped at zero, columns scaled to unit
/// norm. A column that clamps to all zeros is redrawn.
pub fn generate_synthetic_dictionary(signal_dim: usize, num_atoms: usize, seed: u64) -> Result<Dictionary> {
    if signal_dim >= num_atoms && num_atoms > 0 {
        return Err(Error::NotOvercomplete { signal_dim, num_atoms });
    }
    Dictionary::new(synthetic_atoms(signal_dim, num_atoms, seed)?)
}

/// The atoms of [`generate_synthetic_dictionary`] without the overcompleteness
/// requirement.
pub fn synthetic_atoms(signal_dim: usize, num_atoms: usize, seed: u64) -> Result<DMatrix<f64>> {
    if signal_dim == 0 || num_atoms == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = rng_from_seed(seed);
    let mut atoms = DMatrix::zeros(signal_dim, num_atoms);
    for (j, col) in atoms.as_mut_slice().chunks_exact_mut(signal_dim).enumerate() {
        let mut attempts = 0;
        loop {
            for v in col.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v = z.max(0.0);
            }
            if col.iter().any(|&v| v > 0.0) {
                break;
            }
            attempts += 1;
            if attempts > MAX_COLUMN_REDRAWS {
                return Err(Error::DegenerateColumn { column: j, attempts });
            }
        }
        let n = linalg::norm(col);
        col.iter_mut().for_each(|v| *v /= n);
    }
    Ok(atoms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub sparsity: usize,
    pub num_samples: usize,
    pub seed: u64,
}

impl MixtureConfig {
    pub fn new(sparsity: usize, num_samples: usize, seed: u64) -> Self {
        MixtureConfig { sparsity, num_samples, seed }
    }
}

/// Draws `cfg.num_samples` mixtures of `cfg.sparsity` distinct atoms with
/// coefficients uniform on `(0, 1]`. Shards are generated in parallel and
/// concatenated in order.
pub fn sample_mixture(dict: &Dictionary, cfg: MixtureConfig) -> Result<Vec<Sample>> {
    let source = SyntheticMixtures::new(dict, cfg)?;
    let shards = (0..source.num_shards())
        .into_par_iter()
        .map(|s| source.shard(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(shards.into_iter().flatten().collect())
}

/// One mixture drawn from `rng`.
pub fn draw_sample(dict: &Dictionary, sparsity: usize, rng: &mut Rng64) -> Result<Sample> {
    let support = rand::seq::index::sample(rng, dict.num_atoms(), sparsity).into_vec();
    // (0, 1]: the open end at zero keeps every drawn atom in the mixture
    let coeffs: Vec<f64> = (0..sparsity).map(|_| 1.0 - rng.random::<f64>()).collect();
    Sample::from_mixture(dict, support, coeffs)
}

/// A dataset of fixed-sparsity samples read one shard at a time.
pub trait SampleSource: Sync {
    fn sparsity(&self) -> usize;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn num_shards(&self) -> usize;
    fn shard(&self, index: usize) -> Result<Vec<Sample>>;
}

/// Mixtures generated on demand; shard `i` uses seed `derive_seed(seed, i)`.
#[derive(Debug, Clone)]
pub struct SyntheticMixtures<'a> {
    dict: &'a Dictionary,
    cfg: MixtureConfig,
    shard_size: usize,
}

impl<'a> SyntheticMixtures<'a> {
    pub fn new(dict: &'a Dictionary, cfg: MixtureConfig) -> Result<Self> {
        Self::with_shard_size(dict, cfg, DEFAULT_SHARD_SIZE)
    }

    pub fn with_shard_size(dict: &'a Dictionary, cfg: MixtureConfig, shard_size: usize) -> Result<Self> {
        if cfg.sparsity == 0 {
            return Err(Error::ZeroSparsity);
        }
        if cfg.sparsity > dict.num_atoms() {
            return Err(Error::InvalidArgument(format!(
                "sparsity {} exceeds {} atoms",
                cfg.sparsity,
                dict.num_atoms()
            )));
        }
        if cfg.num_samples == 0 || shard_size == 0 {
            return Err(Error::InvalidArgument("sample and shard counts must be positive".into()));
        }
        Ok(SyntheticMixtures { dict, cfg, shard_size })
    }

    pub fn config(&self) -> MixtureConfig {
        self.cfg
    }

    pub fn shard_size(&self) -> usize {
        self.shard_size
    }
}

impl SampleSource for SyntheticMixtures<'_> {
    fn sparsity(&self) -> usize {
        self.cfg.sparsity
    }

    fn len(&self) -> usize {
        self.cfg.num_samples
    }

    fn num_shards(&self) -> usize {
        self.cfg.num_samples.div_ceil(self.shard_size)
    }

    fn shard(&self, index: usize) -> Result<Vec<Sample>> {
        let start = index * self.shard_size;
        if start >= self.cfg.num_samples {
            return Err(Error::InvalidArgument(format!("shard {index} out of range")));
        }
        let count = self.shard_size.min(self.cfg.num_samples - start);
        let mut rng = rng_from_seed(derive_seed(self.cfg.seed, index as u64));
        (0..count).map(|_| draw_sample(self.dict, self.cfg.sparsity, &mut rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_dictionary_postconditions() {
        let d = generate_synthetic_dictionary(30, 200, 7).unwrap();
        assert_eq!((d.signal_dim(), d.num_atoms()), (30, 200));
        assert!(d.matrix().iter().all(|&v| v >= 0.0));
        for j in 0..200 {
            assert!((linalg::norm(d.atom(j)) - 1.0).abs() < 1e-12);
        }
        assert_eq!(generate_synthetic_dictionary(30, 200, 7).unwrap(), d);
        assert_ne!(generate_synthetic_dictionary(30, 200, 8).unwrap(), d);
        assert!(matches!(generate_synthetic_dictionary(5, 5, 0), Err(Error::NotOvercomplete { .. })));
    }

    #[test]
    fn half_the_entries_are_clamped() {
        // P(z ≤ 0) = 1/2 for a standard normal
        let d = generate_synthetic_dictionary(30, 200, 11).unwrap();
        let zeros = d.matrix().iter().filter(|&&v| v == 0.0).count() as f64 / 6000.0;
        assert!((zeros - 0.5).abs() < 0.02, "{zeros}");
    }

    #[test]
    fn single_row_dictionary_never_degenerates() {
        // every column is [1] after normalization; redraws handle the clamped draws
        let d = generate_synthetic_dictionary(1, 50, 3).unwrap();
        assert!(d.matrix().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn mixtures_match_their_ground_truth() {
        let d = generate_synthetic_dictionary(10, 40, 1).unwrap();
        let samples = sample_mixture(&d, MixtureConfig::new(3, 500, 9)).unwrap();
        assert_eq!(samples.len(), 500);
        for s in &samples {
            assert_eq!(s.sparsity(), 3);
            assert!(!s.true_support.has_repeats());
            assert!(s.true_coeffs.iter().all(|&c| c > 0.0 && c <= 1.0));
            let mut y = [0.0; 10];
            for (&i, &a) in s.true_support.indices().iter().zip(&s.true_coeffs) {
                for (r, v) in y.iter_mut().enumerate() {
                    *v += a * d.matrix()[(r, i)];
                }
            }
            let err: f64 = y.iter().zip(s.signal.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(err < 1e-12);
        }
        assert_eq!(sample_mixture(&d, MixtureConfig::new(3, 500, 9)).unwrap(), samples);
    }

    #[test]
    fn one_sparse_mixture_is_a_scaled_atom() {
        let d = generate_synthetic_dictionary(6, 12, 2).unwrap();
        for s in sample_mixture(&d, MixtureConfig::new(1, 20, 4)).unwrap() {
            let i = s.true_support.indices()[0];
            let a = s.true_coeffs[0];
            for (v, p) in s.signal.as_slice().iter().zip(d.atom(i)) {
                assert_eq!(*v, a * p);
            }
        }
    }

    #[test]
    fn sharding_is_invisible_in_the_output_order() {
        let d = generate_synthetic_dictionary(6, 12, 2).unwrap();
        let cfg = MixtureConfig::new(2, 25, 5);
        let src = SyntheticMixtures::with_shard_size(&d, cfg, 10).unwrap();
        assert_eq!(src.num_shards(), 3);
        assert_eq!(src.shard(2).unwrap().len(), 5);
        assert!(src.shard(3).is_err());
        assert!(SyntheticMixtures::new(&d, MixtureConfig::new(13, 1, 0)).is_err());
        assert!(matches!(SyntheticMixtures::new(&d, MixtureConfig::new(0, 1, 0)), Err(Error::ZeroSparsity)));
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
