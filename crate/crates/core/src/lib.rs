//! Non-negative greedy sparse decomposition.
//!
//! * [`solvers`]: matching pursuit with a projected residual (NNMP), active-set
//!   NNLS, and the orthogonal refit variant (NNOMP).
//! * [`network`]: NNMP unfolded into layers whose selection matrices are
//!   trained as per-step classifiers (DeepMP).
//! * [`optim`]: the AdaBound optimizer used for that training.
//! * [`training`]: the epoch loop tying data, objective and optimizer together.
//! * [`datagen`]: synthetic and Raman-like dictionaries, mixtures, dataset files.
//! * [`eval`]: support recovery, reconstruction error, coherence ECDFs, sweeps.

// `!(x > 0.0)` is used on purpose so that NaN counts as "not positive"
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod dictionary;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod network;
pub mod optim;
pub mod solvers;
pub mod training;
pub mod types;

pub use nalgebra;
pub use dictionary::{synthesize, validate_dictionary, Dictionary};
pub use error::{Error, Result};
pub use network::{init_from_dictionary, UnfoldedModel};
pub use solvers::{hard_max, nnls_active_set, nnmp_solve, nnomp_solve, ProjectionMode, PursuitResult};
pub use types::{Sample, Signal, SparseCode, SupportSet};
