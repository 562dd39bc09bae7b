use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::datagen::{derive_seed, sample_mixture, MixtureConfig};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::network::UnfoldedModel;
use crate::solvers::{nnmp_solve, nnomp_solve, ProjectionMode, PursuitResult};
use crate::types::Signal;

use super::coherence::{coherence_ecdf, uniform_grid};
use super::metrics::{hamming_complement, relative_error};
use super::report::MetricsReport;

pub const DEFAULT_TEST_SAMPLES: usize = 5000;
pub const DEFAULT_ECDF_POINTS: usize = 200;

#[derive(Debug, Clone)]
pub enum Solver {
    Nnmp(ProjectionMode),
    Nnomp,
    /// One independently trained model per sparsity level, keyed by depth.
    DeepMp(BTreeMap<usize, UnfoldedModel>),
}

impl Solver {
    pub fn label(&self) -> &'static str {
        match self {
            Solver::Nnmp(_) => "NNMP",
            Solver::Nnomp => "NNOMP",
            Solver::DeepMp(_) => "DeepMP",
        }
    }

    /// Runs the solver with step budget `k`.
    pub fn solve(&self, dict: &Dictionary, y: &Signal, k: usize) -> Result<PursuitResult> {
        match self {
            Solver::Nnmp(proj) => nnmp_solve(dict, y, k, *proj),
            Solver::Nnomp => nnomp_solve(dict, y, k),
            Solver::DeepMp(models) => models.get(&k).ok_or(Error::MissingModel(k))?.forward_infer(y),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sparsities: Vec<usize>,
    /// Test mixtures per sparsity level.
    pub z: usize,
    /// Mixtures for sparsity `k` are drawn with `derive_seed(seed, k)`.
    pub seed: u64,
    pub ecdf_points: usize,
}

impl SweepConfig {
    pub fn new(sparsities: impl IntoIterator<Item = usize>, z: usize, seed: u64) -> Self {
        SweepConfig { sparsities: sparsities.into_iter().collect(), z, seed, ecdf_points: DEFAULT_ECDF_POINTS }
    }
}

/// Evaluates every solver on the same fresh mixtures at each sparsity `k`,
/// with step budget `k`.
///
/// Every solver sees identical test sets. Samples are solved in parallel and
/// reduced in sample order, so reports are reproducible. The report ECDF is
/// the dictionary's for NNMP and NNOMP, and the last layer of the deepest
/// model for DeepMP.
pub fn run_sweep(dict: &Dictionary, solvers: &[Solver], cfg: &SweepConfig) -> Result<Vec<MetricsReport>> {
    if cfg.z == 0 {
        return Err(Error::InvalidArgument("test set size must be positive".into()));
    }
    for solver in solvers {
        if let Solver::DeepMp(models) = solver {
            for &k in &cfg.sparsities {
                let model = models.get(&k).ok_or(Error::MissingModel(k))?;
                if model.depth() != k || model.update_dict() != dict {
                    return Err(Error::InvalidArgument(format!("model for k = {k} does not match the dictionary or depth")));
                }
            }
        }
    }

    let grid = uniform_grid(cfg.ecdf_points);
    let mut reports: Vec<MetricsReport> = solvers
        .iter()
        .map(|s| {
            let matrix = match s {
                Solver::DeepMp(models) => {
                    let deepest = models.values().next_back().ok_or(Error::MissingModel(0))?;
                    deepest.selection_weights().last().expect("depth ≥ 1")
                }
                _ => dict.matrix(),
            };
            Ok(MetricsReport {
                solver: s.label().to_string(),
                z: cfg.z,
                recovery: BTreeMap::new(),
                epsilon: BTreeMap::new(),
                ecdf: coherence_ecdf(matrix, &grid)?,
            })
        })
        .collect::<Result<_>>()?;

    for &k in &cfg.sparsities {
        let samples = sample_mixture(dict, MixtureConfig::new(k, cfg.z, derive_seed(cfg.seed, k as u64)))?;
        for (solver, report) in solvers.iter().zip(reports.iter_mut()) {
            let per_sample = samples
                .par_iter()
                .map(|s| {
                    let res = solver.solve(dict, &s.signal, k)?;
                    let hit = hamming_complement(&res.support, &s.true_support, k)?;
                    let err = relative_error(dict, s.signal.as_slice(), &res.code)?;
                    Ok((hit, err))
                })
                .collect::<Result<Vec<_>>>()?;
            let (hits, errs) = per_sample.iter().fold((0.0, 0.0), |(h, e), (a, b)| (h + a, e + b));
            report.recovery.insert(k, hits / cfg.z as f64);
            report.epsilon.insert(k, errs / cfg.z as f64);
        }
    }
    Ok(reports)
}
