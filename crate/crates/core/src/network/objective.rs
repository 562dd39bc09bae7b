//! Softmax-relaxed per-layer classification objective.
//!
//! Training never runs the hard-max. Each layer sees the residual produced by
//! the ground-truth path (teacher forcing) and is scored with a categorical
//! cross-entropy against the atom that path removes next. Teacher residuals do
//! not depend on the selection weights, so the gradient of layer `k` is the
//! closed form `r_k (p_k − e_{t_k})ᵀ` with no backpropagation across layers.

use nalgebra::DMatrix;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::solvers::{ProjectionMode, RESIDUAL_FLOOR};
use crate::types::Sample;

use super::UnfoldedModel;

/// Ground-truth path through a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TeacherPath {
    /// One atom per layer; layers past `active` list the leftover atoms in
    /// ascending order.
    pub targets: Vec<usize>,
    /// Residual entering each active layer.
    pub residuals: Vec<Vec<f64>>,
    /// Layers whose input residual is above the floor.
    pub active: usize,
}

/// Walks the mixture's true atoms in oracle-NNMP order: at each layer the
/// remaining true atom best correlated with the residual is removed with
/// coefficient `⟨φ_t, r⟩`, then the projection is applied.
pub fn teacher_path(dict: &Dictionary, proj: ProjectionMode, sample: &Sample, depth: usize) -> Result<TeacherPath> {
    if sample.sparsity() != depth {
        return Err(Error::SparsityMismatch { expected: depth, found: sample.sparsity() });
    }
    if sample.signal.len() != dict.signal_dim() {
        return Err(Error::DimensionMismatch { expected: dict.signal_dim(), found: sample.signal.len() });
    }
    let mut remaining: Vec<usize> = sample.true_support.indices().to_vec();
    remaining.sort_unstable();
    let mut r = sample.signal.as_slice().to_vec();
    let mut targets = Vec::with_capacity(depth);
    let mut residuals = Vec::with_capacity(depth);

    for _ in 0..depth {
        if linalg::norm(&r) < RESIDUAL_FLOOR {
            break;
        }
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (pos, &i) in remaining.iter().enumerate() {
            let s = linalg::dot(dict.atom(i), &r);
            if s > best_score {
                best_score = s;
                best = pos;
            }
        }
        let t = remaining.remove(best);
        residuals.push(r.clone());
        targets.push(t);
        linalg::axpy(-best_score, dict.atom(t), &mut r);
        proj.apply(&mut r);
    }
    let active = residuals.len();
    targets.extend(remaining);
    Ok(TeacherPath { targets, residuals, active })
}

/// Samples of a single sparsity with their teacher paths precomputed.
#[derive(Debug, Clone)]
pub struct TrainingBatch {
    samples: Vec<Sample>,
    paths: Vec<TeacherPath>,
    depth: usize,
}

impl TrainingBatch {
    pub fn new(model: &UnfoldedModel, samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let paths = samples
            .iter()
            .map(|s| teacher_path(model.update_dict(), model.projection(), s, model.depth()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrainingBatch { samples, paths, depth: model.depth() })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn paths(&self) -> &[TeacherPath] {
        &self.paths
    }

    /// Per-sample target atoms, one per layer.
    pub fn targets(&self) -> impl Iterator<Item = &[usize]> {
        self.paths.iter().map(|p| p.targets.as_slice())
    }
}

#[derive(Debug, Clone)]
pub struct TrainForward {
    /// `softmax(W⁽ᵏ⁾ᵀ r_k)` for every layer.
    pub distributions: Vec<Vec<f64>>,
    /// Teacher residual entering every layer; after the residual vanishes the
    /// last residual is repeated.
    pub residuals: Vec<Vec<f64>>,
    pub targets: Vec<usize>,
    pub active_layers: usize,
}

pub fn forward_train(model: &UnfoldedModel, sample: &Sample) -> Result<TrainForward> {
    let path = teacher_path(model.update_dict(), model.projection(), sample, model.depth())?;
    let mut residuals = path.residuals.clone();
    if residuals.len() < model.depth() {
        let mut last = sample.signal.as_slice().to_vec();
        for t in &path.targets[..path.active] {
            let c = linalg::dot(model.update_dict().atom(*t), &last);
            linalg::axpy(-c, model.update_dict().atom(*t), &mut last);
            model.projection().apply(&mut last);
        }
        residuals.resize(model.depth(), last);
    }
    let distributions = model
        .selection_weights()
        .iter()
        .zip(&residuals)
        .map(|(w, r)| softmax(&linalg::correlate(w, r)))
        .collect();
    Ok(TrainForward { distributions, residuals, targets: path.targets, active_layers: path.active })
}

#[derive(Debug, Clone)]
pub struct LossGradient {
    /// Mean of `−log p_k(t_k)` over every active (sample, layer) pair.
    pub loss: f64,
    /// Mean over the samples active at each layer; NaN for a layer no sample
    /// reaches.
    pub layer_losses: Vec<f64>,
    /// Exact derivative of `loss` with respect to each selection matrix.
    pub gradients: Vec<DMatrix<f64>>,
    /// Number of (sample, layer) terms in the mean.
    pub terms: usize,
}

/// Cross-entropy loss and its gradient over a batch.
///
/// Layer `k` stacks the teacher residuals into `R` (`signal_dim × B`), scores
/// `S = Wᵀ R`, and its gradient is `R (P − E)ᵀ / T` with `P` the softmax of
/// each score column, `E` the one-hot targets and `T` the total term count.
pub fn loss_and_gradient(model: &UnfoldedModel, batch: &TrainingBatch) -> Result<LossGradient> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if batch.depth != model.depth() {
        return Err(Error::SparsityMismatch { expected: model.depth(), found: batch.depth });
    }
    let m = model.signal_dim();
    let n = model.num_atoms();
    let mut loss_sum = 0.0;
    let mut terms = 0;
    let mut layer_losses = Vec::with_capacity(model.depth());
    let mut gradients = Vec::with_capacity(model.depth());

    for (k, w) in model.selection_weights().iter().enumerate() {
        let active: Vec<&TeacherPath> = batch.paths.iter().filter(|p| p.active > k).collect();
        if active.is_empty() {
            layer_losses.push(f64::NAN);
            gradients.push(DMatrix::zeros(m, n));
            continue;
        }
        let mut residuals = DMatrix::zeros(m, active.len());
        for (b, p) in active.iter().enumerate() {
            residuals.column_mut(b).copy_from_slice(&p.residuals[k]);
        }
        let mut scores = w.tr_mul(&residuals);
        let mut layer_sum = 0.0;
        for (b, p) in active.iter().enumerate() {
            let t = p.targets[k];
            let s = &mut scores.as_mut_slice()[b * n..(b + 1) * n];
            let log_p_t = log_softmax_at(s, t);
            layer_sum -= log_p_t;
            softmax_in_place(s);
            s[t] -= 1.0;
        }
        loss_sum += layer_sum;
        terms += active.len();
        layer_losses.push(layer_sum / active.len() as f64);
        gradients.push(&residuals * scores.transpose());
    }

    if terms > 0 {
        let scale = 1.0 / terms as f64;
        gradients.iter_mut().for_each(|g| *g *= scale);
    }
    let loss = if terms > 0 { loss_sum / terms as f64 } else { 0.0 };
    Ok(LossGradient { loss, layer_losses, gradients, terms })
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let mut p = scores.to_vec();
    softmax_in_place(&mut p);
    p
}

fn softmax_in_place(s: &mut [f64]) {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in s.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    s.iter_mut().for_each(|v| *v /= total);
}

fn log_softmax_at(s: &[f64], t: usize) -> f64 {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = s.iter().map(|v| (v - max).exp()).sum();
    s[t] - max - total.ln()
}
