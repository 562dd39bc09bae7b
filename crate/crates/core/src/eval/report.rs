use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

/// Per-sparsity results of one solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub solver: String,
    /// Test mixtures per sparsity level.
    pub z: usize,
    /// Mean Hamming complement per `k`.
    pub recovery: BTreeMap<usize, f64>,
    /// Mean relative reconstruction error per `k`.
    pub epsilon: BTreeMap<usize, f64>,
    /// `(t, ECDF(t))` of the pairwise coherences of the matrix the solver
    /// selects with.
    pub ecdf: Vec<(f64, f64)>,
}

/// `solver,k,recovery,epsilon`, one row per solver and sparsity.
pub fn write_metrics_csv<W: Write>(reports: &[MetricsReport], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "solver,k,recovery,epsilon")?;
    for r in reports {
        for (k, rec) in &r.recovery {
            writeln!(w, "{},{},{},{}", r.solver, k, rec, r.epsilon[k])?;
        }
    }
    Ok(())
}

/// Two columns `t,ecdf`.
pub fn write_ecdf_csv<W: Write>(ecdf: &[(f64, f64)], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "t,ecdf")?;
    for (t, f) in ecdf {
        writeln!(w, "{t},{f}")?;
    }
    Ok(())
}
