//! On-disk mixture datasets: CSV shards plus a JSON sidecar.
//!
//! Each row holds one sample: `k` cells of `index:coefficient`, then the
//! signal values.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Sample, Signal, SupportSet};

use super::SampleSource;

pub const COEFFICIENT_LAW: &str = "uniform(0,1]";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub signal_dim: usize,
    pub num_atoms: usize,
    pub k: usize,
    pub seed: u64,
    pub num_samples: usize,
    pub coefficient_law: String,
    pub shards: Vec<String>,
}

pub fn format_sample_row(sample: &Sample) -> String {
    let mut cells: Vec<String> = sample
        .true_support
        .indices()
        .iter()
        .zip(&sample.true_coeffs)
        .map(|(i, a)| format!("{i}:{a}"))
        .collect();
    cells.extend(sample.signal.as_slice().iter().map(|v| v.to_string()));
    cells.join(",")
}

/// Parses one row; `row` is 1-based and only used in error messages.
pub fn parse_sample_row(line: &str, k: usize, signal_dim: usize, num_atoms: usize, row: usize) -> Result<Sample> {
    let cells: Vec<&str> = line.trim().split(',').map(str::trim).collect();
    if cells.len() != k + signal_dim {
        return Err(Error::Parse {
            row,
            column: cells.len().min(k + signal_dim) + 1,
            message: format!("expected {} cells, found {}", k + signal_dim, cells.len()),
        });
    }
    let bad = |column: usize, message: String| Error::Parse { row, column, message };
    let mut support = Vec::with_capacity(k);
    let mut coeffs = Vec::with_capacity(k);
    for (c, cell) in cells[..k].iter().enumerate() {
        let (i, a) = cell.split_once(':').ok_or_else(|| bad(c + 1, format!("expected index:coefficient, found {cell:?}")))?;
        let i: usize = i.parse().map_err(|_| bad(c + 1, format!("bad atom index {i:?}")))?;
        let a: f64 = a.parse().map_err(|_| bad(c + 1, format!("bad coefficient {a:?}")))?;
        if i >= num_atoms {
            return Err(bad(c + 1, format!("atom {i} out of range")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(bad(c + 1, format!("coefficient {a} is not positive")));
        }
        support.push(i);
        coeffs.push(a);
    }
    let support = SupportSet::new(support);
    if support.has_repeats() {
        return Err(bad(1, "repeated atom in support".into()));
    }
    let values = cells[k..]
        .iter()
        .enumerate()
        .map(|(c, v)| v.parse::<f64>().map_err(|_| bad(k + c + 1, format!("bad signal value {v:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sample { signal: Signal::new(values)?, true_support: support, true_coeffs: coeffs })
}

/// Streams `source` into `dir`, one CSV per shard, and writes the sidecar.
pub fn write_dataset(dir: impl AsRef<Path>, source: &dyn SampleSource, signal_dim: usize, num_atoms: usize, seed: u64) -> Result<DatasetMeta> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut shards = Vec::with_capacity(source.num_shards());
    for s in 0..source.num_shards() {
        let name = format!("shard-{s:05}.csv");
        let path = dir.join(&name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        for sample in source.shard(s)? {
            writeln!(w, "{}", format_sample_row(&sample)).map_err(|e| Error::io(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        shards.push(name);
    }
    let meta = DatasetMeta {
        signal_dim,
        num_atoms,
        k: source.sparsity(),
        seed,
        num_samples: source.len(),
        coefficient_law: COEFFICIENT_LAW.to_string(),
        shards,
    };
    let path = dir.join(META_FILE);
    fs::write(&path, serde_json::to_string_pretty(&meta)?).map_err(|e| Error::io(&path, e))?;
    Ok(meta)
}

/// A dataset directory written by [`write_dataset`].
#[derive(Debug, Clone)]
pub struct ShardFiles {
    dir: PathBuf,
    meta: DatasetMeta,
}

impl ShardFiles {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let path = dir.join(META_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let meta: DatasetMeta = serde_json::from_str(&text)?;
        Ok(ShardFiles { dir, meta })
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }
}

impl SampleSource for ShardFiles {
    fn sparsity(&self) -> usize {
        self.meta.k
    }

    fn len(&self) -> usize {
        self.meta.num_samples
    }

    fn num_shards(&self) -> usize {
        self.meta.shards.len()
    }

    fn shard(&self, index: usize) -> Result<Vec<Sample>> {
        let name = self
            .meta
            .shards
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("shard {index} out of range")))?;
        let path = self.dir.join(name);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(parse_sample_row(&line, self.meta.k, self.meta.signal_dim, self.meta.num_atoms, n + 1)?);
        }
        Ok(out)
    }
}
