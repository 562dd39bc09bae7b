//! Epoch loop: shuffled minibatches of teacher-forced samples, AdaBound
//! updates on the selection matrices, and a validation pass per epoch.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{derive_seed, rng_from_seed, SampleSource};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::eval::hamming_complement;
use crate::network::{loss_and_gradient, TrainingBatch, UnfoldedModel};
use crate::optim::{AdaBound, AdaBoundConfig};
use crate::solvers::ProjectionMode;
use crate::types::Sample;

pub const DEFAULT_BATCH_SIZE: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: AdaBoundConfig,
    /// Seeds the per-epoch shuffles.
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig { epochs: 20, batch_size: DEFAULT_BATCH_SIZE, optimizer: AdaBoundConfig::default(), seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 0 is the untrained model.
    pub epoch: usize,
    /// Mean cross-entropy over the epoch's batches; for epoch 0, of the
    /// initial model over the training set.
    pub mean_loss: f64,
    /// Mean Hamming complement of hard-max inference on the validation set;
    /// NaN when there is none.
    pub validation_recovery: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: UnfoldedModel,
    pub log: Vec<EpochLog>,
}

/// Splits `total` trials into `(train, validation)` counts.
pub fn split_counts(total: usize, validation_fraction: f64) -> (usize, usize) {
    let val = ((total as f64) * validation_fraction.clamp(0.0, 1.0)).round() as usize;
    let val = val.min(total.saturating_sub(1));
    (total - val, val)
}

/// Trains a depth-`train.sparsity()` model initialized from `dict`.
///
/// Each epoch visits the shards in a shuffled order, shuffles the samples
/// within each shard and takes one optimizer step per minibatch. With zero
/// epochs the returned model equals the initialization.
pub fn train_model(
    dict: &Dictionary,
    proj: ProjectionMode,
    train: &dyn SampleSource,
    validation: &[Sample],
    cfg: &TrainingConfig,
) -> Result<TrainOutcome> {
    if cfg.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    if train.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut model = UnfoldedModel::from_dictionary(dict, train.sparsity(), proj)?;
    let mut opt = AdaBound::new(cfg.optimizer, model.selection_weights())?;

    let initial = initial_loss(&model, train, cfg.batch_size)?;
    let mut log = vec![EpochLog { epoch: 0, mean_loss: initial, validation_recovery: validation_recovery(&model, validation)? }];

    for epoch in 1..=cfg.epochs {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, epoch as u64));
        let mut order: Vec<usize> = (0..train.num_shards()).collect();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        let mut terms = 0usize;
        for s in order {
            let mut samples = train.shard(s)?;
            samples.shuffle(&mut rng);
            for chunk in samples.chunks(cfg.batch_size) {
                let batch = TrainingBatch::new(&model, chunk.to_vec())?;
                let lg = loss_and_gradient(&model, &batch)?;
                if !lg.loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch });
                }
                opt.step(model.selection_weights_mut(), &lg.gradients).map_err(|e| match e {
                    Error::NonFiniteGradient => Error::NonFiniteLoss { epoch },
                    other => other,
                })?;
                loss_sum += lg.loss * lg.terms as f64;
                terms += lg.terms;
            }
        }
        let mean_loss = if terms > 0 { loss_sum / terms as f64 } else { 0.0 };
        if model.selection_weights().iter().any(|w| w.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFiniteLoss { epoch });
        }
        log.push(EpochLog { epoch, mean_loss, validation_recovery: validation_recovery(&model, validation)? });
    }
    Ok(TrainOutcome { model, log })
}

fn initial_loss(model: &UnfoldedModel, train: &dyn SampleSource, batch_size: usize) -> Result<f64> {
    let mut loss_sum = 0.0;
    let mut terms = 0usize;
    for s in 0..train.num_shards() {
        for chunk in train.shard(s)?.chunks(batch_size) {
            let lg = loss_and_gradient(model, &TrainingBatch::new(model, chunk.to_vec())?)?;
            loss_sum += lg.loss * lg.terms as f64;
            terms += lg.terms;
        }
    }
    if !loss_sum.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: 0 });
    }
    Ok(if terms > 0 { loss_sum / terms as f64 } else { 0.0 })
}

/// Mean Hamming complement of `model` on `samples`; NaN if empty.
pub fn validation_recovery(model: &UnfoldedModel, samples: &[Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Ok(f64::NAN);
    }
    let k = model.depth();
    let hits = samples
        .par_iter()
        .map(|s| hamming_complement(&model.forward_infer(&s.signal)?.support, &s.true_support, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.iter().sum::<f64>() / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate_synthetic_dictionary, sample_mixture, MixtureConfig, SyntheticMixtures};

    #[test]
    fn split() {
        assert_eq!(split_counts(150_000, 0.1), (135_000, 15_000));
        assert_eq!(split_counts(1, 0.1), (1, 0));
        assert_eq!(split_counts(10, 0.0), (10, 0));
    }

    #[test]
    fn zero_epochs_returns_the_initialization() {
        let d = generate_synthetic_dictionary(5, 12, 0).unwrap();
        let src = SyntheticMixtures::new(&d, MixtureConfig::new(2, 50, 1)).unwrap();
        let cfg = TrainingConfig { epochs: 0, ..Default::default() };
        let out = train_model(&d, ProjectionMode::PositiveOrthant, &src, &[], &cfg).unwrap();
        assert_eq!(out.model, UnfoldedModel::from_dictionary(&d, 2, ProjectionMode::PositiveOrthant).unwrap());
        assert_eq!(out.log.len(), 1);
        assert!(out.log[0].validation_recovery.is_nan());
    }

    #[test]
    fn short_run_is_deterministic_and_lowers_loss() {
        let d = generate_synthetic_dictionary(8, 30, 2).unwrap();
        let src = SyntheticMixtures::with_shard_size(&d, MixtureConfig::new(2, 600, 3), 256).unwrap();
        let val = sample_mixture(&d, MixtureConfig::new(2, 100, 4)).unwrap();
        let cfg = TrainingConfig { epochs: 4, batch_size: 32, seed: 9, ..Default::default() };
        let a = train_model(&d, ProjectionMode::PositiveOrthant, &src, &val, &cfg).unwrap();
        let b = train_model(&d, ProjectionMode::PositiveOrthant, &src, &val, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.log, b.log);
        assert_eq!(a.log.len(), 5);
        assert!(a.log[4].mean_loss < a.log[0].mean_loss, "{:?}", a.log);
    }
}
