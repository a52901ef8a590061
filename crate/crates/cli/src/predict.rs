use std::io::Write;

use ae_spectra::rmt::{predicted_modulus_stats, predicted_sq_modulus, ChainSpec};
use anyhow::Context;
use serde::Serialize;

use crate::args::{parse_list, PredictArgs};
use crate::error::CliError;
use crate::manifest::ensure_writable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionRow {
    pub n1: usize,
    pub median_sq: f64,
    pub max_sq: f64,
    pub median_norm: f64,
    pub max_norm: f64,
}

/// Predicted epoch-0 quantiles of |λ|² and |λ| for the latent Jacobian of
/// the 784-128-64-32-n₁ autoencoder.
pub fn prediction_row(n1: usize) -> Result<PredictionRow, CliError> {
    let spec = ChainSpec::autoencoder(n1).map_err(|e| CliError::Usage(e.to_string()))?;
    let norms = predicted_modulus_stats(&spec);
    let sq = |u| predicted_sq_modulus(&spec, u).expect("u in [0, 1]");
    Ok(PredictionRow {
        n1,
        median_sq: sq(0.5),
        max_sq: sq(1.0),
        median_norm: norms.median,
        max_norm: norms.max,
    })
}

pub fn table(dims: &[usize]) -> Result<Vec<PredictionRow>, CliError> {
    dims.iter().map(|&n1| prediction_row(n1)).collect()
}

pub fn write_table<W: Write>(rows: &[PredictionRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn execute(args: &PredictArgs) -> anyhow::Result<Vec<PredictionRow>> {
    let dims = parse_list(&args.dims)?;
    let rows = table(&dims)?;
    match &args.out {
        Some(path) => {
            ensure_writable(path, args.force)?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_table(&rows, file)?;
        }
        None => write_table(&rows, std::io::stdout().lock())?,
    }
    Ok(rows)
}
