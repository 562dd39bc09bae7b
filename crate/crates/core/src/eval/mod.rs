//! Support recovery, reconstruction error, coherence statistics and the
//! sweep harness that runs solvers over fresh mixtures.

mod coherence;
mod metrics;
mod report;
mod sweep;

pub use coherence::{coherence, coherence_ecdf, pairwise_coherences, uniform_grid};
pub use metrics::{epsilon_error, hamming_complement, hamming_complement_raw, relative_error};
pub use report::{write_ecdf_csv, write_metrics_csv, MetricsReport};
pub use sweep::{run_sweep, Solver, SweepConfig, DEFAULT_ECDF_POINTS, DEFAULT_TEST_SAMPLES};
