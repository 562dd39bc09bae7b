//! Run configuration. A missing file or section means the full-scale defaults
//! for the synthetic setting.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use deepmp_core::datagen::{derive_seed, DEFAULT_SHARD_SIZE};
use deepmp_core::eval::{DEFAULT_ECDF_POINTS, DEFAULT_TEST_SAMPLES};
use deepmp_core::optim::AdaBoundConfig;
use deepmp_core::training::DEFAULT_BATCH_SIZE;
use deepmp_core::ProjectionMode;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionarySource {
    Synthetic,
    Raman,
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionaryConfig {
    pub source: DictionarySource,
    pub signal_dim: usize,
    pub num_atoms: usize,
    /// Raman library CSV, required for `source = "raman"`.
    pub path: Option<PathBuf>,
    pub peaks_per_atom: usize,
    /// Overrides the seed derived from the master seed.
    pub seed: Option<u64>,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig {
            source: DictionarySource::Synthetic,
            signal_dim: 30,
            num_atoms: 200,
            path: None,
            peaks_per_atom: 3,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Trials per sparsity level, split into training and validation.
    pub num_train_samples: usize,
    pub validation_fraction: f64,
    pub shard_size: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig { k_min: 1, k_max: 5, num_train_samples: 150_000, validation_fraction: 0.1, shard_size: DEFAULT_SHARD_SIZE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Defaults to 20 for generated dictionaries and 30 for a Raman library.
    pub epochs: Option<usize>,
    pub batch_size: usize,
    pub projection: ProjectionMode,
    #[serde(flatten)]
    pub optimizer: AdaBoundConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: None,
            batch_size: DEFAULT_BATCH_SIZE,
            projection: ProjectionMode::PositiveOrthant,
            optimizer: AdaBoundConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub z_test: usize,
    pub ecdf_points: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { z_test: DEFAULT_TEST_SAMPLES, ecdf_points: DEFAULT_ECDF_POINTS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Multiplies `num_train_samples` and `z_test`.
    pub scale: f64,
    pub out_dir: PathBuf,
    pub dictionary: DictionaryConfig,
    pub data: DataConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            scale: 1.0,
            out_dir: PathBuf::from("run"),
            dictionary: DictionaryConfig::default(),
            data: DataConfig::default(),
            train: TrainConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

// seed streams under the master seed
const DICTIONARY_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;
const VALIDATION_STREAM: u64 = 3;
const SHUFFLE_STREAM: u64 = 4;
const TEST_STREAM: u64 = 5;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.data;
        if d.k_min == 0 || d.k_min > d.k_max {
            bail!("k range {}..={} is empty or starts at zero", d.k_min, d.k_max);
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            bail!("scale must be positive, got {}", self.scale);
        }
        if !(0.0..1.0).contains(&d.validation_fraction) {
            bail!("validation_fraction must lie in [0, 1)");
        }
        if d.shard_size == 0 || self.train.batch_size == 0 {
            bail!("shard_size and batch_size must be positive");
        }
        if self.eval.ecdf_points < 2 {
            bail!("ecdf_points must be at least 2");
        }
        self.train.optimizer.validate()?;
        Ok(())
    }

    pub fn sparsities(&self) -> Vec<usize> {
        (self.data.k_min..=self.data.k_max).collect()
    }

    fn scaled(&self, n: usize) -> usize {
        ((n as f64 * self.scale).round() as usize).max(1)
    }

    pub fn num_trials(&self) -> usize {
        self.scaled(self.data.num_train_samples)
    }

    pub fn z_test(&self) -> usize {
        self.scaled(self.eval.z_test)
    }

    pub fn epochs(&self) -> usize {
        self.train.epochs.unwrap_or(match self.dictionary.source {
            DictionarySource::Raman => 30,
            _ => 20,
        })
    }

    pub fn dictionary_seed(&self) -> u64 {
        self.dictionary.seed.unwrap_or_else(|| derive_seed(self.seed, DICTIONARY_STREAM))
    }

    pub fn train_seed(&self, k: usize) -> u64 {
        derive_seed(derive_seed(self.seed, TRAIN_STREAM), k as u64)
    }

    pub fn validation_seed(&self, k: usize) -> u64 {
        derive_seed(derive_seed(self.seed, VALIDATION_STREAM), k as u64)
    }

    pub fn shuffle_seed(&self, k: usize) -> u64 {
        derive_seed(derive_seed(self.seed, SHUFFLE_STREAM), k as u64)
    }

    pub fn test_seed(&self) -> u64 {
        derive_seed(self.seed, TEST_STREAM)
    }
}
