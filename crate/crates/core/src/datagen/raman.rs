//! Raman spectral libraries: loading exported spectra and a Lorentzian
//! surrogate for when no library is at hand.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;

use crate::dictionary::{read_matrix_csv, Dictionary};
use crate::error::{Error, Result};
use crate::linalg;

use super::rng_from_seed;

#[derive(Debug, Clone)]
pub struct RamanLibrary {
    pub dictionary: Dictionary,
    /// Negative readings set to zero on load.
    pub clamped_negatives: usize,
}

/// Loads spectra stored in the dictionary CSV layout (one row per
/// wavenumber, one column per spectrum), clamps negative readings to zero and
/// normalizes every spectrum.
pub fn load_raman_library(path: impl AsRef<Path>) -> Result<RamanLibrary> {
    let mut m = match read_matrix_csv(path) {
        Err(Error::EmptyInput) => return Err(Error::EmptyLibrary),
        other => other?,
    };
    let mut clamped = 0;
    m.apply(|v| {
        if *v < 0.0 {
            *v = 0.0;
            clamped += 1;
        }
    });
    if let Some(&column) = linalg::normalize_columns(&mut m).first() {
        return Err(Error::ZeroColumn { column });
    }
    Ok(RamanLibrary { dictionary: Dictionary::new(m)?, clamped_negatives: clamped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateConfig {
    pub signal_dim: usize,
    pub num_atoms: usize,
    pub peaks_per_atom: usize,
    /// Half-width at half-maximum range of each peak, in grid points.
    pub width_range: (f64, f64),
    /// Upper bound of the broad background level relative to the tallest
    /// possible peak; zero disables the background.
    pub background: f64,
    pub seed: u64,
}

impl SurrogateConfig {
    pub fn new(signal_dim: usize, num_atoms: usize, peaks_per_atom: usize, seed: u64) -> Self {
        let w = signal_dim as f64;
        SurrogateConfig {
            signal_dim,
            num_atoms,
            peaks_per_atom,
            width_range: ((w / 250.0).max(0.5), (w / 40.0).max(1.0)),
            background: 0.5,
            seed,
        }
    }
}

/// Spectra-like dictionary; see [`generate_raman_surrogate_with`].
pub fn generate_raman_surrogate(signal_dim: usize, num_atoms: usize, peaks_per_atom: usize, seed: u64) -> Result<Dictionary> {
    generate_raman_surrogate_with(&SurrogateConfig::new(signal_dim, num_atoms, peaks_per_atom, seed))
}

/// Each atom is a sum of `peaks_per_atom` Lorentzian lines with uniform
/// random centers, widths and heights in `(0.2, 1]`, on top of a very broad
/// Lorentzian background. Atoms are non-negative and normalized; shared
/// backgrounds and overlapping lines make the dictionary coherent.
pub fn generate_raman_surrogate_with(cfg: &SurrogateConfig) -> Result<Dictionary> {
    Dictionary::new(surrogate_atoms(cfg)?)
}

/// Surrogate atoms of any shape, including `signal_dim ≥ num_atoms`.
pub fn surrogate_atoms(cfg: &SurrogateConfig) -> Result<DMatrix<f64>> {
    if cfg.peaks_per_atom == 0 {
        return Err(Error::InvalidArgument("peaks_per_atom must be at least 1".into()));
    }
    let (lo, hi) = cfg.width_range;
    if !(lo > 0.0 && hi >= lo) || !(cfg.background >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid surrogate shape parameters {cfg:?}")));
    }
    if cfg.signal_dim == 0 || cfg.num_atoms == 0 {
        return Err(Error::EmptyInput);
    }
    let dim = cfg.signal_dim as f64;
    let mut rng = rng_from_seed(cfg.seed);
    let mut m = DMatrix::zeros(cfg.signal_dim, cfg.num_atoms);
    for col in m.as_mut_slice().chunks_exact_mut(cfg.signal_dim) {
        if cfg.background > 0.0 {
            let level = cfg.background * rng.random::<f64>();
            let center = rng.random::<f64>() * dim;
            add_lorentzian(col, center, dim, level);
        }
        for _ in 0..cfg.peaks_per_atom {
            let center = rng.random::<f64>() * (dim - 1.0);
            let width = lo + (hi - lo) * rng.random::<f64>();
            let height = 0.2 + 0.8 * (1.0 - rng.random::<f64>());
            add_lorentzian(col, center, width, height);
        }
    }
    if let Some(&column) = linalg::normalize_columns(&mut m).first() {
        return Err(Error::ZeroColumn { column });
    }
    Ok(m)
}

fn add_lorentzian(col: &mut [f64], center: f64, half_width: f64, height: f64) {
    let g2 = half_width * half_width;
    for (x, v) in col.iter_mut().enumerate() {
        let d = x as f64 - center;
        *v += height * g2 / (d * d + g2);
    }
}
