//! AdaBound: Adam with per-coordinate step sizes clipped into a band that
//! narrows toward `final_lr` as training proceeds.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaBoundConfig {
    pub lr: f64,
    pub final_lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for AdaBoundConfig {
    fn default() -> Self {
        AdaBoundConfig { lr: 1e-3, final_lr: 0.1, beta1: 0.9, beta2: 0.999, gamma: 1e-3, epsilon: 1e-8 }
    }
}

impl AdaBoundConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && self.final_lr > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.gamma > 0.0
            && self.epsilon >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid AdaBound hyperparameters {self:?}")))
        }
    }

    /// Step-size band `(lower, upper)` at step `t ≥ 1`.
    pub fn bounds(&self, t: u64) -> (f64, f64) {
        let gt = self.gamma * t as f64;
        (self.final_lr * (1.0 - 1.0 / (gt + 1.0)), self.final_lr * (1.0 + 1.0 / gt))
    }

    /// `clip(lr / √(v̂ + ε), lower(t), upper(t))`
    pub fn step_size(&self, t: u64, v_hat: f64) -> f64 {
        let (lo, hi) = self.bounds(t);
        (self.lr / (v_hat + self.epsilon).sqrt()).clamp(lo, hi)
    }
}

#[derive(Debug, Clone)]
pub struct AdaBound {
    config: AdaBoundConfig,
    m: Vec<DMatrix<f64>>,
    v: Vec<DMatrix<f64>>,
    t: u64,
}

impl AdaBound {
    /// Zeroed moments shaped like `params`.
    pub fn new(config: AdaBoundConfig, params: &[DMatrix<f64>]) -> Result<Self> {
        config.validate()?;
        let zeros: Vec<_> = params.iter().map(|p| DMatrix::zeros(p.nrows(), p.ncols())).collect();
        Ok(AdaBound { config, m: zeros.clone(), v: zeros, t: 0 })
    }

    pub fn config(&self) -> &AdaBoundConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn first_moment(&self) -> &[DMatrix<f64>] {
        &self.m
    }

    pub fn second_moment(&self) -> &[DMatrix<f64>] {
        &self.v
    }

    /// One update. Shapes are checked and gradients must be finite; on error
    /// neither parameters nor state change.
    pub fn step(&mut self, params: &mut [DMatrix<f64>], grads: &[DMatrix<f64>]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::ShapeMismatch(format!(
                "optimizer tracks {} tensors, got {} params and {} gradients",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        for (i, ((p, g), m)) in params.iter().zip(grads).zip(&self.m).enumerate() {
            if p.shape() != m.shape() || g.shape() != m.shape() {
                return Err(Error::ShapeMismatch(format!(
                    "tensor {i}: state {:?}, param {:?}, gradient {:?}",
                    m.shape(),
                    p.shape(),
                    g.shape()
                )));
            }
        }
        if grads.iter().any(|g| g.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFiniteGradient);
        }

        self.t += 1;
        let c = self.config;
        let t = self.t;
        let bias1 = 1.0 - c.beta1.powi(t.min(i32::MAX as u64) as i32);
        let bias2 = 1.0 - c.beta2.powi(t.min(i32::MAX as u64) as i32);

        for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            let it = p
                .as_mut_slice()
                .iter_mut()
                .zip(g.as_slice())
                .zip(m.as_mut_slice().iter_mut().zip(v.as_mut_slice().iter_mut()));
            for ((pi, &gi), (mi, vi)) in it {
                *mi = c.beta1 * *mi + (1.0 - c.beta1) * gi;
                *vi = c.beta2 * *vi + (1.0 - c.beta2) * gi * gi;
                let m_hat = *mi / bias1;
                let v_hat = *vi / bias2;
                *pi -= c.step_size(t, v_hat) * m_hat;
            }
        }
        Ok(())
    }
}
