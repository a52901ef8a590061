use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ae_spectra::autoencoder::{forward, AutoencoderParams};
use ae_spectra::checkpoint::Checkpoint;
use ae_spectra::exec::{self, Workers};
use ae_spectra::jacobian::{input_jacobian, latent_jacobian};
use ae_spectra::linalg::{eigenvalues, Spectrum};
use ae_spectra::spectra::{summarize, SpectralSummary};
use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{parse_list, AnalyzeArgs, JacobianArg, DEFAULT_POINTS, DESK_POINTS, DESK_SAMPLES};
use crate::dataset;
use crate::error::CliError;
use crate::manifest::{CommandKind, RunManifest};
use crate::train::CHECKPOINT_DIR;

pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const EIGS_DIR: &str = "eigs";

/// Column schema of `summary.csv`, version 1.
pub const SCHEMA: [&str; 18] = [
    "run_id", "latent_dim", "epoch", "n_points", "n_eigs", "mod_min", "mod_q25", "mod_med",
    "mod_q75", "mod_p95", "mod_max", "arg_min", "arg_q25", "arg_med", "arg_q75", "arg_p95",
    "arg_max", "n_zero_eigs",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub run_id: String,
    pub latent_dim: usize,
    pub epoch: usize,
    pub n_points: usize,
    pub n_eigs: usize,
    pub mod_min: f64,
    pub mod_q25: f64,
    pub mod_med: f64,
    pub mod_q75: f64,
    pub mod_p95: f64,
    pub mod_max: f64,
    pub arg_min: Option<f64>,
    pub arg_q25: Option<f64>,
    pub arg_med: Option<f64>,
    pub arg_q75: Option<f64>,
    pub arg_p95: Option<f64>,
    pub arg_max: Option<f64>,
    pub n_zero_eigs: usize,
}

impl SummaryRow {
    pub fn new(run_id: &str, s: &SpectralSummary) -> Self {
        let m = s.modulus_quantiles();
        let a = s.argument_quantiles();
        Self {
            run_id: run_id.to_string(),
            latent_dim: s.latent_dim,
            epoch: s.epoch,
            n_points: s.sample_points,
            n_eigs: s.eigen_count,
            mod_min: m.min,
            mod_q25: m.q25,
            mod_med: m.median,
            mod_q75: m.q75,
            mod_p95: m.p95,
            mod_max: m.max,
            arg_min: a.map(|q| q.min),
            arg_q25: a.map(|q| q.q25),
            arg_med: a.map(|q| q.median),
            arg_q75: a.map(|q| q.q75),
            arg_p95: a.map(|q| q.p95),
            arg_max: a.map(|q| q.max),
            n_zero_eigs: s.zero_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub run_id: String,
    pub jacobian: String,
    pub summary: SpectralSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckpointFile {
    pub latent_dim: usize,
    pub epoch: usize,
    pub path: PathBuf,
}

fn parse_checkpoint_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("ae_d")?.strip_suffix(".ckpt")?;
    let (d, e) = rest.split_once("_e")?;
    Some((d.parse().ok()?, e.parse().ok()?))
}

/// Checkpoint files in `dir`, sorted by (latent dimension, epoch).
pub fn find_checkpoints(dir: &Path) -> anyhow::Result<Vec<CheckpointFile>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("cannot read checkpoint directory {}: {e}", dir.display())))?;
    let mut found = Vec::new();
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name();
        if let Some((latent_dim, epoch)) = name.to_str().and_then(parse_checkpoint_name) {
            found.push(CheckpointFile {
                latent_dim,
                epoch,
                path: entry.path(),
            });
        }
    }
    found.sort();
    Ok(found)
}

/// Eigenvalues of the chosen Jacobian at every point.
pub fn cell_spectra(
    params: &AutoencoderParams,
    points: &[&Vec<f64>],
    which: JacobianArg,
    workers: Workers,
) -> anyhow::Result<Vec<Spectrum>> {
    let spectra = exec::try_map(points, workers, |x| -> anyhow::Result<Spectrum> {
        let cache = forward(params, x)?;
        let j = match which {
            JacobianArg::Latent => latent_jacobian(params, &cache),
            JacobianArg::Input => input_jacobian(params, &cache),
        };
        Ok(eigenvalues(&j)?)
    })?;
    Ok(spectra)
}

/// Opens `path` for appending rows of [`SCHEMA`], writing the header if the
/// file is new and refusing a file whose header differs.
pub fn append_rows(path: &Path, rows: &[SummaryRow]) -> anyhow::Result<()> {
    let expected = SCHEMA.join(",");
    let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
    if !fresh {
        let mut reader = csv::Reader::from_path(path)?;
        let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if found.join(",") != expected {
            return Err(CliError::Schema {
                path: path.to_path_buf(),
                found: found.join(","),
                expected,
            }
            .into());
        }
    }
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> anyhow::Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let rows = reader.deserialize().collect::<Result<Vec<SummaryRow>, _>>()?;
    Ok(rows)
}

pub fn read_records(path: &Path) -> anyhow::Result<Vec<SummaryRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_records(path: &Path, records: &[SummaryRecord]) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(records)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_eigs(path: &Path, spectra: &[Spectrum], indices: &[usize]) -> anyhow::Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "point,re,im")?;
    for (s, &i) in spectra.iter().zip(indices) {
        for z in s.values() {
            writeln!(w, "{i},{},{}", z.re, z.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutcome {
    pub run_id: String,
    pub summaries: Vec<SpectralSummary>,
}

pub fn execute(args: &AnalyzeArgs, workers: Workers) -> anyhow::Result<AnalyzeOutcome> {
    let ckpt_dir = args
        .checkpoints
        .clone()
        .unwrap_or_else(|| args.out.join(CHECKPOINT_DIR));
    let dims = args.dims.as_deref().map(parse_list).transpose()?;
    let epochs = args.epochs.as_deref().map(parse_list).transpose()?;
    let files: Vec<CheckpointFile> = find_checkpoints(&ckpt_dir)?
        .into_iter()
        .filter(|c| dims.as_ref().is_none_or(|d| d.contains(&c.latent_dim)))
        .filter(|c| epochs.as_ref().is_none_or(|e| e.contains(&c.epoch)))
        .collect();
    if files.is_empty() {
        return Err(CliError::Data(format!(
            "no ae_d<d>_e<epoch>.ckpt files to analyse in {}",
            ckpt_dir.display()
        ))
        .into());
    }

    let mut checkpoints = Vec::with_capacity(files.len());
    for f in &files {
        let bytes = fs::read(&f.path).with_context(|| format!("reading {}", f.path.display()))?;
        let ckpt = Checkpoint::from_bytes(&bytes)
            .with_context(|| format!("loading {}", f.path.display()))?;
        if ckpt.latent_dim() != f.latent_dim || ckpt.epoch as usize != f.epoch {
            return Err(CliError::Data(format!(
                "{} holds d = {}, epoch = {}; the file name says d = {}, epoch = {}",
                f.path.display(),
                ckpt.latent_dim(),
                ckpt.epoch,
                f.latent_dim,
                f.epoch
            ))
            .into());
        }
        let digest: String = Sha256::digest(&bytes)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        checkpoints.push((ckpt, digest));
    }

    let default_samples = args.desk.then_some(DESK_SAMPLES);
    let (data, label) = dataset::load(&args.data, default_samples)?;
    let count = args
        .points
        .unwrap_or(if args.desk { DESK_POINTS } else { DEFAULT_POINTS });
    if count == 0 {
        return Err(CliError::Usage("--points must be positive".into()).into());
    }
    let indices = data.sample_indices(count, args.seed);
    let points: Vec<&Vec<f64>> = indices.iter().map(|&i| &data.points[i]).collect();

    let jacobian_name = match args.jacobian {
        JacobianArg::Latent => "latent",
        JacobianArg::Input => "input",
    };
    let mut manifest = RunManifest::new(CommandKind::Analyze);
    manifest.seeds = vec![args.seed];
    manifest.dataset = Some(label);
    manifest.latent_dims = files.iter().map(|f| f.latent_dim).collect();
    manifest.latent_dims.dedup();
    manifest.epochs = files.iter().map(|f| f.epoch).collect();
    manifest.epochs.sort_unstable();
    manifest.epochs.dedup();
    manifest.set("points", indices.len()).set("jacobian", jacobian_name);
    for (f, (_, digest)) in files.iter().zip(&checkpoints) {
        manifest.set(&format!("ckpt_d{}_e{}", f.latent_dim, f.epoch), digest);
    }
    manifest.output = Some(args.out.clone());
    manifest.workers = Some(workers.0);
    let run_id = manifest.run_id();

    let csv_path = args.out.join(SUMMARY_CSV);
    let json_path = args.out.join(SUMMARY_JSON);
    let mut records = read_records(&json_path)?;
    if csv_path.exists() {
        let existing = read_rows(&csv_path);
        if let Ok(rows) = existing {
            if rows.iter().any(|r| r.run_id == run_id) {
                return Err(CliError::Exists(csv_path).into());
            }
        }
    }
    let eigs_dir = args.out.join(EIGS_DIR);
    if args.dump_eigs {
        for f in &files {
            let p = eigs_dir.join(format!("{run_id}_d{}_e{}.csv", f.latent_dim, f.epoch));
            if p.exists() {
                return Err(CliError::Exists(p).into());
            }
        }
        fs::create_dir_all(&eigs_dir)?;
    }
    fs::create_dir_all(&args.out)?;

    let mut summaries = Vec::with_capacity(files.len());
    let mut rows = Vec::with_capacity(files.len());
    for (f, (ckpt, _)) in files.iter().zip(&checkpoints) {
        let spectra = cell_spectra(&ckpt.params, &points, args.jacobian, workers)
            .with_context(|| format!("spectra for d = {}, epoch = {}", f.latent_dim, f.epoch))?;
        let summary = summarize(&spectra, f.epoch, f.latent_dim)?;
        if args.dump_eigs {
            let p = eigs_dir.join(format!("{run_id}_d{}_e{}.csv", f.latent_dim, f.epoch));
            write_eigs(&p, &spectra, &indices)?;
        }
        eprintln!(
            "d = {:>2}, epoch = {:>3}: median |λ| = {:.5}",
            f.latent_dim,
            f.epoch,
            summary.modulus_quantiles().median
        );
        rows.push(SummaryRow::new(&run_id, &summary));
        records.push(SummaryRecord {
            run_id: run_id.clone(),
            jacobian: jacobian_name.to_string(),
            summary: summary.clone(),
        });
        summaries.push(summary);
    }

    append_rows(&csv_path, &rows)?;
    write_records(&json_path, &records)?;
    manifest.write(&args.out)?;
    Ok(AnalyzeOutcome { run_id, summaries })
}
