//! Matching pursuit unfolded into a trainable network.
//!
//! Layer `k` scores atoms with its own selection matrix `W⁽ᵏ⁾` and picks one
//! by hard-max. The residual update `r ← P(r − ⟨φ_ι, r⟩ φ_ι)` always uses the
//! fixed dictionary. With every `W⁽ᵏ⁾ = Φ` the network is exactly NNMP.

mod format;
mod objective;

use nalgebra::DMatrix;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::solvers::{check_inputs, hard_max, ProjectionMode, PursuitResult, RESIDUAL_FLOOR};
use crate::types::{Signal, SparseCode, SupportSet};

pub use format::{read_model, write_model, MODEL_MAGIC};
pub use objective::{forward_train, loss_and_gradient, teacher_path, LossGradient, TrainForward, TrainingBatch};

#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedModel {
    selection_weights: Vec<DMatrix<f64>>,
    update_dict: Dictionary,
    proj: ProjectionMode,
}

impl UnfoldedModel {
    /// Every layer starts as an independent copy of the dictionary.
    pub fn from_dictionary(dict: &Dictionary, depth: usize, proj: ProjectionMode) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroBudget);
        }
        Ok(UnfoldedModel {
            selection_weights: vec![dict.matrix().clone(); depth],
            update_dict: dict.clone(),
            proj,
        })
    }

    pub fn from_parts(selection_weights: Vec<DMatrix<f64>>, update_dict: Dictionary, proj: ProjectionMode) -> Result<Self> {
        if selection_weights.is_empty() {
            return Err(Error::ZeroBudget);
        }
        let shape = update_dict.matrix().shape();
        for (k, w) in selection_weights.iter().enumerate() {
            if w.shape() != shape {
                return Err(Error::ShapeMismatch(format!(
                    "layer {k} has shape {:?}, dictionary has {:?}",
                    w.shape(),
                    shape
                )));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("selection weights"));
            }
        }
        Ok(UnfoldedModel { selection_weights, update_dict, proj })
    }

    pub fn depth(&self) -> usize {
        self.selection_weights.len()
    }

    pub fn signal_dim(&self) -> usize {
        self.update_dict.signal_dim()
    }

    pub fn num_atoms(&self) -> usize {
        self.update_dict.num_atoms()
    }

    /// Trainable parameters: `depth · signal_dim · num_atoms`.
    pub fn parameter_count(&self) -> usize {
        self.selection_weights.iter().map(|w| w.len()).sum()
    }

    pub fn projection(&self) -> ProjectionMode {
        self.proj
    }

    pub fn update_dict(&self) -> &Dictionary {
        &self.update_dict
    }

    pub fn selection_weights(&self) -> &[DMatrix<f64>] {
        &self.selection_weights
    }

    pub fn selection_weights_mut(&mut self) -> &mut [DMatrix<f64>] {
        &mut self.selection_weights
    }

    /// Hard-max inference.
    ///
    /// Layer `k` selects `ι = argmax W⁽ᵏ⁾ᵀ r` and stops the pursuit if that
    /// score is not positive. The coefficient is recomputed against the
    /// dictionary as `⟨φ_ι, r⟩`.
    pub fn forward_infer(&self, y: &Signal) -> Result<PursuitResult> {
        let dict = &self.update_dict;
        check_inputs(dict.signal_dim(), y, self.depth())?;
        let mut r = y.as_slice().to_vec();
        let mut x = vec![0.0; dict.num_atoms()];
        let mut support = SupportSet::default();
        let mut norms = vec![linalg::norm(&r)];

        for w in &self.selection_weights {
            if norms[norms.len() - 1] < RESIDUAL_FLOOR {
                break;
            }
            let (score, iota) = hard_max(&linalg::correlate(w, &r))?;
            if !(score > 0.0) {
                break;
            }
            let coeff = linalg::dot(dict.atom(iota), &r);
            // a trained selector may pick an atom the residual is not aligned with
            let coeff = coeff.max(0.0);
            x[iota] += coeff;
            support.push(iota);
            linalg::axpy(-coeff, dict.atom(iota), &mut r);
            self.proj.apply(&mut r);
            norms.push(linalg::norm(&r));
        }

        Ok(PursuitResult {
            code: SparseCode::from_vec_unchecked(x),
            steps_taken: support.len(),
            support,
            residual: Signal::from_vec_unchecked(r),
            residual_norms: norms,
        })
    }
}

/// See [`UnfoldedModel::from_dictionary`].
pub fn init_from_dictionary(dict: &Dictionary, depth: usize, proj: ProjectionMode) -> Result<UnfoldedModel> {
    UnfoldedModel::from_dictionary(dict, depth, proj)
}
