use std::path::PathBuf;

use ae_spectra::data::{load_mnist, synthetic_dataset, Dataset, Split};
use anyhow::Context;

use crate::args::DataArgs;

pub const DATA_DIR_ENV: &str = "SPECTRA_DATA_DIR";
pub const DEFAULT_DATA_DIR: &str = "data/mnist";

pub fn data_dir(args: &DataArgs) -> PathBuf {
    args.data
        .clone()
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR))
}

/// Loads the training set named by `args` and a short description of it for
/// the run manifest. `default_samples` applies when `--samples` is absent.
pub fn load(args: &DataArgs, default_samples: Option<usize>) -> anyhow::Result<(Dataset, String)> {
    let limit = args.samples.or(default_samples);
    if let Some(count) = args.synthetic {
        let count = limit.map_or(count, |l| l.min(count));
        let data = synthetic_dataset(count, args.data_seed)?;
        return Ok((data, format!("synthetic:{count}:seed={}", args.data_seed)));
    }
    let dir = data_dir(args);
    let mut data = load_mnist(&dir, Split::Train)
        .with_context(|| format!("loading MNIST (set --data or ${DATA_DIR_ENV})"))?;
    if let Some(l) = limit {
        data = data.truncated(l);
    }
    let label = format!("mnist-train:{}", data.len());
    Ok((data, label))
}
