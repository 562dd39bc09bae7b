//! Untrained greedy pursuits: non-negative matching pursuit and an
//! orthogonal variant that refits all selected atoms by NNLS each step.

mod nnls;
mod nnmp;
mod nnomp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Signal, SparseCode, SupportSet};

pub use nnls::{nnls_active_set, KKT_TOLERANCE};
pub use nnmp::nnmp_solve;
pub use nnomp::nnomp_solve;

/// Pursuits stop once the residual norm falls below this, regardless of the
/// sign of the best score.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Operator applied to the residual after each update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMode {
    Identity,
    #[default]
    PositiveOrthant,
}

impl ProjectionMode {
    pub fn apply(self, r: &mut [f64]) {
        match self {
            ProjectionMode::Identity => {}
            ProjectionMode::PositiveOrthant => r.iter_mut().for_each(|v| *v = v.max(0.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitResult {
    pub code: SparseCode,
    pub support: SupportSet,
    pub residual: Signal,
    pub steps_taken: usize,
    /// `‖r_0‖, ‖r_1‖, …, ‖r_steps‖`
    pub residual_norms: Vec<f64>,
}

/// Largest entry and its position; ties go to the lowest index.
pub fn hard_max(scores: &[f64]) -> Result<(f64, usize)> {
    let (&first, rest) = scores.split_first().ok_or(Error::EmptyInput)?;
    let mut best = (first, 0);
    for (i, &s) in rest.iter().enumerate() {
        if s > best.0 {
            best = (s, i + 1);
        }
    }
    Ok(best)
}

pub(crate) fn check_inputs(signal_dim: usize, y: &Signal, budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if y.len() != signal_dim {
        return Err(Error::DimensionMismatch { expected: signal_dim, found: y.len() });
    }
    Ok(())
}
