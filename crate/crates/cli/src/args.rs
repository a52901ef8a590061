use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ae-spectra", version, about = "Random-matrix checks, autoencoder training and latent Jacobian spectra")]
pub struct Cli {
    /// Worker threads for data-parallel stages (0 = all cores, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample random-matrix ensembles and test them against their limiting laws.
    RmtVerify(RmtVerifyArgs),
    /// Train one autoencoder per latent dimension and write checkpoints.
    Train(TrainArgs),
    /// Compute Jacobian spectra at every checkpoint and write summaries.
    Analyze(AnalyzeArgs),
    /// Print the predicted epoch-0 squared-modulus quantiles.
    Predict(PredictArgs),
    /// Render box plots from analysis summaries.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// MNIST directory (falls back to $SPECTRA_DATA_DIR).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Use this many synthetic points instead of MNIST.
    #[arg(long, value_name = "COUNT")]
    pub synthetic: Option<usize>,
    /// Seed of the synthetic dataset.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    /// Keep only the first COUNT training points.
    #[arg(long, value_name = "COUNT")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RmtVerifyArgs {
    /// Law to check: semicircle, circular, product<M>, chain[:n1,n2,...]. Default: the full suite.
    #[arg(long)]
    pub law: Option<String>,
    /// Matrix order (ignored for chains).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of seeds.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out/rmt")]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Latent dimensions, e.g. `2..20`, `2..=20`, `4` or `2,4,8` [default: 2..20].
    #[arg(long)]
    pub dims: Option<String>,
    /// [default: 300, or 10 with --desk]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Comma-separated checkpoint epochs (0 is always added).
    #[arg(long)]
    pub checkpoints: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Desk-scale profile: d in {2,4,8,16}, 10 epochs, 10k samples.
    #[arg(long)]
    pub desk: bool,
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JacobianArg {
    Latent,
    Input,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Directory holding `ae_d{d}_e{epoch}.ckpt` files (default: <out>/checkpoints).
    #[arg(long)]
    pub checkpoints: Option<PathBuf>,
    /// Only these latent dimensions.
    #[arg(long)]
    pub dims: Option<String>,
    /// Only these epochs (comma separated).
    #[arg(long)]
    pub epochs: Option<String>,
    /// Data points per (dimension, epoch) cell.
    #[arg(long)]
    pub points: Option<usize>,
    /// Seed of the point subsample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Desk-scale profile: 300 points, 10k samples.
    #[arg(long)]
    pub desk: bool,
    #[arg(long, value_enum, default_value_t = JacobianArg::Latent)]
    pub jacobian: JacobianArg,
    /// Also write every eigenvalue to eigs/.
    #[arg(long)]
    pub dump_eigs: bool,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Latent dimensions n1.
    #[arg(long, default_value = "2..20")]
    pub dims: String,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Directory with summary.json from `analyze`.
    #[arg(long, default_value = "out")]
    pub summary: PathBuf,
    /// Expected latent dimensions (default: those present).
    #[arg(long)]
    pub dims: Option<String>,
    /// Expected epochs (default: those present).
    #[arg(long)]
    pub epochs: Option<String>,
    #[arg(long, default_value = "out/report")]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

pub const DESK_DIMS: [usize; 4] = [2, 4, 8, 16];
pub const DESK_EPOCHS: usize = 10;
pub const DESK_SAMPLES: usize = 10_000;
pub const DESK_POINTS: usize = 300;
pub const DEFAULT_POINTS: usize = 1000;
pub const DEFAULT_EPOCHS: usize = 300;
pub const DEFAULT_DIMS: &str = "2..20";

/// Parses `a..b` (inclusive, as in the experiment grid), `a..=b`, `a` or
/// `a,b,c` into a sorted list without duplicates.
pub fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse list {text:?}"));
    let text = text.trim();
    let mut out: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}
