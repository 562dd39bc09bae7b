use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use deepmp_core::datagen::{
    generate_raman_surrogate, generate_synthetic_dictionary, load_raman_library, write_dataset, MixtureConfig, SampleSource, ShardFiles, SyntheticMixtures,
};
use deepmp_core::eval::{coherence, coherence_ecdf, run_sweep, uniform_grid, write_ecdf_csv, write_metrics_csv, Solver, SweepConfig};
use deepmp_core::nalgebra::DMatrix;
use deepmp_core::network::{read_model, write_model};
use deepmp_core::training::{split_counts, train_model, EpochLog, TrainingConfig};
use deepmp_core::{Dictionary, Sample, UnfoldedModel};
use log::info;
use serde::Serialize;

use crate::config::{DictionarySource, RunConfig};
use crate::manifest::Manifest;

pub const DICTIONARY_CSV: &str = "dictionary.csv";
pub const DICTIONARY_META: &str = "dictionary.json";

pub fn model_path(out: &Path, k: usize) -> PathBuf {
    out.join("models").join(format!("deepmp_k{k}.bin"))
}

fn train_log_path(out: &Path, k: usize) -> PathBuf {
    out.join("models").join(format!("train_log_k{k}.csv"))
}

fn data_dir(out: &Path, k: usize, split: &str) -> PathBuf {
    out.join("data").join(format!("k{k}")).join(split)
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Serialize)]
struct DictionaryMeta {
    source: DictionarySource,
    signal_dim: usize,
    num_atoms: usize,
    seed: Option<u64>,
    path: Option<PathBuf>,
    peaks_per_atom: Option<usize>,
    clamped_negatives: Option<usize>,
    coherence: f64,
}

pub fn gen_dict(cfg: &RunConfig) -> Result<()> {
    let out = &cfg.out_dir;
    create_dir(out)?;
    let mut manifest = Manifest::new("gen-dict", cfg);
    let d = &cfg.dictionary;
    let seed = cfg.dictionary_seed();
    let mut meta = DictionaryMeta {
        source: d.source,
        signal_dim: d.signal_dim,
        num_atoms: d.num_atoms,
        seed: Some(seed),
        path: None,
        peaks_per_atom: None,
        clamped_negatives: None,
        coherence: 0.0,
    };
    let dict = match d.source {
        DictionarySource::Synthetic => generate_synthetic_dictionary(d.signal_dim, d.num_atoms, seed)?,
        DictionarySource::Surrogate => {
            meta.peaks_per_atom = Some(d.peaks_per_atom);
            generate_raman_surrogate(d.signal_dim, d.num_atoms, d.peaks_per_atom, seed)?
        }
        DictionarySource::Raman => {
            let path = d
                .path
                .as_ref()
                .ok_or_else(|| anyhow!(deepmp_core::Error::InvalidArgument("dictionary.path is required for source = \"raman\"".into())))?;
            let lib = load_raman_library(path)?;
            manifest.input(path)?;
            if lib.clamped_negatives > 0 {
                info!("clamped {} negative readings to zero", lib.clamped_negatives);
            }
            meta.seed = None;
            meta.path = Some(path.clone());
            meta.clamped_negatives = Some(lib.clamped_negatives);
            meta.signal_dim = lib.dictionary.signal_dim();
            meta.num_atoms = lib.dictionary.num_atoms();
            lib.dictionary
        }
    };
    meta.coherence = coherence(dict.matrix())?;

    let csv = out.join(DICTIONARY_CSV);
    dict.write_csv(&csv)?;
    let json = out.join(DICTIONARY_META);
    fs::write(&json, serde_json::to_string_pretty(&meta)? + "\n").with_context(|| format!("writing {}", json.display()))?;
    manifest.output(&csv)?;
    manifest.output(&json)?;
    manifest.write(out)?;
    info!("wrote {} ({} × {}, coherence {:.4})", csv.display(), dict.signal_dim(), dict.num_atoms(), meta.coherence);
    Ok(())
}

fn load_dictionary(cfg: &RunConfig, manifest: &mut Manifest) -> Result<Dictionary> {
    let path = cfg.out_dir.join(DICTIONARY_CSV);
    if !path.exists() {
        return Err(anyhow!(deepmp_core::Error::InvalidArgument(format!(
            "{} not found; run gen-dict first",
            path.display()
        ))));
    }
    let dict = Dictionary::read_csv(&path)?;
    manifest.input(&path)?;
    Ok(dict)
}

fn mixture_sources<'a>(cfg: &RunConfig, dict: &'a Dictionary, k: usize) -> Result<(SyntheticMixtures<'a>, Option<SyntheticMixtures<'a>>)> {
    let (n_train, n_val) = split_counts(cfg.num_trials(), cfg.data.validation_fraction);
    let shard = cfg.data.shard_size;
    let train = SyntheticMixtures::with_shard_size(dict, MixtureConfig::new(k, n_train, cfg.train_seed(k)), shard)?;
    let val = if n_val > 0 {
        Some(SyntheticMixtures::with_shard_size(dict, MixtureConfig::new(k, n_val, cfg.validation_seed(k)), shard)?)
    } else {
        None
    };
    Ok((train, val))
}

pub fn gen_data(cfg: &RunConfig) -> Result<()> {
    let out = &cfg.out_dir;
    let mut manifest = Manifest::new("gen-data", cfg);
    let dict = load_dictionary(cfg, &mut manifest)?;
    for k in cfg.sparsities() {
        let (train, val) = mixture_sources(cfg, &dict, k)?;
        let sets: Vec<(&str, &SyntheticMixtures, u64)> = std::iter::once(("train", &train, cfg.train_seed(k)))
            .chain(val.as_ref().map(|v| ("validation", v, cfg.validation_seed(k))))
            .collect();
        for (split, src, seed) in sets {
            let dir = data_dir(out, k, split);
            if dir.exists() {
                fs::remove_dir_all(&dir).with_context(|| format!("clearing {}", dir.display()))?;
            }
            let meta = write_dataset(&dir, src, dict.signal_dim(), dict.num_atoms(), seed)?;
            for name in meta.shards.iter().map(String::as_str).chain(["meta.json"]) {
                manifest.output(&dir.join(name))?;
            }
            info!("k = {k}: wrote {} {split} samples to {}", meta.num_samples, dir.display());
        }
    }
    manifest.write(out)?;
    Ok(())
}

fn check_dataset(files: &ShardFiles, dict: &Dictionary, k: usize) -> Result<()> {
    let m = files.meta();
    if m.k != k || m.signal_dim != dict.signal_dim() || m.num_atoms != dict.num_atoms() {
        return Err(anyhow!(deepmp_core::Error::InvalidArgument(format!(
            "dataset (k = {}, {} × {}) does not match k = {k} and the dictionary",
            m.k, m.signal_dim, m.num_atoms
        ))));
    }
    Ok(())
}

fn collect(source: &dyn SampleSource) -> Result<Vec<Sample>> {
    let mut all = Vec::with_capacity(source.len());
    for s in 0..source.num_shards() {
        all.extend(source.shard(s)?);
    }
    Ok(all)
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let out = &cfg.out_dir;
    let mut manifest = Manifest::new("train", cfg);
    let dict = load_dictionary(cfg, &mut manifest)?;
    create_dir(&out.join("models"))?;

    for k in cfg.sparsities() {
        let train_dir = data_dir(out, k, "train");
        let val_dir = data_dir(out, k, "validation");
        let tcfg = TrainingConfig {
            epochs: cfg.epochs(),
            batch_size: cfg.train.batch_size,
            optimizer: cfg.train.optimizer,
            seed: cfg.shuffle_seed(k),
        };
        let outcome = if train_dir.join("meta.json").exists() {
            let files = ShardFiles::open(&train_dir)?;
            check_dataset(&files, &dict, k)?;
            let validation = if val_dir.join("meta.json").exists() {
                let v = ShardFiles::open(&val_dir)?;
                check_dataset(&v, &dict, k)?;
                collect(&v)?
            } else {
                Vec::new()
            };
            info!("k = {k}: training on {} stored samples", files.len());
            train_model(&dict, cfg.train.projection, &files, &validation, &tcfg)?
        } else {
            let (train, val) = mixture_sources(cfg, &dict, k)?;
            let validation = match &val {
                Some(v) => collect(v)?,
                None => Vec::new(),
            };
            info!("k = {k}: training on {} generated samples", train.len());
            train_model(&dict, cfg.train.projection, &train, &validation, &tcfg)?
        };

        let model_file = model_path(out, k);
        write_model(&outcome.model, &model_file)?;
        let log_file = train_log_path(out, k);
        write_with(&log_file, |w| write_train_log(&outcome.log, w))?;
        manifest.output(&model_file)?;
        manifest.output(&log_file)?;
        if let (Some(first), Some(last)) = (outcome.log.first(), outcome.log.last()) {
            info!(
                "k = {k}: loss {:.4} -> {:.4}, validation recovery {:.4} -> {:.4}",
                first.mean_loss, last.mean_loss, first.validation_recovery, last.validation_recovery
            );
        }
    }
    manifest.write(out)?;
    Ok(())
}

fn write_train_log<W: Write>(log: &[EpochLog], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "epoch,mean_loss,validation_recovery")?;
    for e in log {
        writeln!(w, "{},{},{}", e.epoch, e.mean_loss, e.validation_recovery)?;
    }
    Ok(())
}

fn load_models(cfg: &RunConfig, dict: &Dictionary, manifest: &mut Manifest) -> Result<BTreeMap<usize, UnfoldedModel>> {
    let mut models = BTreeMap::new();
    for k in cfg.sparsities() {
        let path = model_path(&cfg.out_dir, k);
        if !path.exists() {
            return Err(anyhow!(deepmp_core::Error::MissingModel(k))).with_context(|| format!("{} not found", path.display()));
        }
        let model = read_model(&path)?;
        if model.depth() != k || model.update_dict() != dict {
            return Err(anyhow!(deepmp_core::Error::InvalidModel(format!(
                "{} was not trained for k = {k} on this dictionary",
                path.display()
            ))));
        }
        manifest.input(&path)?;
        models.insert(k, model);
    }
    Ok(models)
}

fn write_ecdf_file(path: &Path, matrix: &DMatrix<f64>, grid: &[f64], manifest: &mut Manifest) -> Result<()> {
    let ecdf = coherence_ecdf(matrix, grid)?;
    write_with(path, |w| write_ecdf_csv(&ecdf, w))?;
    manifest.output(path)
}

fn write_ecdfs(cfg: &RunConfig, dict: &Dictionary, models: &BTreeMap<usize, UnfoldedModel>, manifest: &mut Manifest) -> Result<()> {
    let dir = cfg.out_dir.join("ecdf");
    create_dir(&dir)?;
    let grid = uniform_grid(cfg.eval.ecdf_points);
    write_ecdf_file(&dir.join("dictionary.csv"), dict.matrix(), &grid, manifest)?;
    for (k, model) in models {
        for (l, w) in model.selection_weights().iter().enumerate() {
            write_ecdf_file(&dir.join(format!("k{k}_layer{l}.csv")), w, &grid, manifest)?;
        }
    }
    Ok(())
}

pub fn eval(cfg: &RunConfig) -> Result<()> {
    let out = &cfg.out_dir;
    let mut manifest = Manifest::new("eval", cfg);
    let dict = load_dictionary(cfg, &mut manifest)?;
    let models = load_models(cfg, &dict, &mut manifest)?;

    let solvers = [Solver::Nnmp(cfg.train.projection), Solver::Nnomp, Solver::DeepMp(models.clone())];
    let sweep = SweepConfig {
        sparsities: cfg.sparsities(),
        z: cfg.z_test(),
        seed: cfg.test_seed(),
        ecdf_points: cfg.eval.ecdf_points,
    };
    info!("evaluating {} solvers on {} mixtures per k", solvers.len(), sweep.z);
    let reports = run_sweep(&dict, &solvers, &sweep)?;

    let csv = out.join("metrics.csv");
    write_with(&csv, |w| write_metrics_csv(&reports, w))?;
    let json = out.join("metrics.json");
    fs::write(&json, serde_json::to_string_pretty(&reports)? + "\n").with_context(|| format!("writing {}", json.display()))?;
    manifest.output(&csv)?;
    manifest.output(&json)?;
    write_ecdfs(cfg, &dict, &models, &mut manifest)?;
    manifest.write(out)?;

    for r in &reports {
        let rec: Vec<String> = r.recovery.iter().map(|(k, v)| format!("k={k}:{v:.4}")).collect();
        println!("{:<7} recovery {}", r.solver, rec.join(" "));
    }
    Ok(())
}

/// ECDFs of the dictionary, of any trained models present and of extra CSV
/// matrices given on the command line.
pub fn ecdf(cfg: &RunConfig, extra: &[PathBuf]) -> Result<()> {
    let out = &cfg.out_dir;
    let mut manifest = Manifest::new("ecdf", cfg);
    let dict = load_dictionary(cfg, &mut manifest)?;
    let mut models = BTreeMap::new();
    for k in cfg.sparsities() {
        let path = model_path(out, k);
        if path.exists() {
            manifest.input(&path)?;
            models.insert(k, read_model(&path)?);
        }
    }
    write_ecdfs(cfg, &dict, &models, &mut manifest)?;
    println!("dictionary coherence {:.6}", coherence(dict.matrix())?);
    for (k, model) in &models {
        for (l, w) in model.selection_weights().iter().enumerate() {
            println!("k={k} layer {l} coherence {:.6}", coherence(w)?);
        }
    }

    let grid = uniform_grid(cfg.eval.ecdf_points);
    for path in extra {
        let m = deepmp_core::dictionary::read_matrix_csv(path)?;
        manifest.input(path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
        let target = out.join("ecdf").join(format!("{stem}.csv"));
        write_ecdf_file(&target, &m, &grid, &mut manifest)?;
        println!("{} coherence {:.6}", path.display(), coherence(&m)?);
    }
    manifest.write(out)?;
    Ok(())
}
