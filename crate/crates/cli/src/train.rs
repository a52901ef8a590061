use std::collections::BTreeSet;
use std::path::PathBuf;

use ae_spectra::autoencoder::{init, train, Optimizer, TrainingConfig, MAX_LATENT, MIN_LATENT};
use ae_spectra::checkpoint::Checkpoint;
use anyhow::Context;
use serde::Serialize;

use crate::args::{
    parse_list, OptimizerArg, TrainArgs, DEFAULT_DIMS, DEFAULT_EPOCHS, DESK_DIMS, DESK_EPOCHS,
    DESK_SAMPLES,
};
use crate::dataset;
use crate::error::CliError;
use crate::manifest::{CommandKind, RunManifest};

pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRow {
    pub latent_dim: usize,
    pub epoch: usize,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainPlan {
    pub dims: Vec<usize>,
    pub config: TrainingConfig,
    pub samples: Option<usize>,
}

pub fn plan(args: &TrainArgs) -> Result<TrainPlan, CliError> {
    let dims = match (&args.dims, args.desk) {
        (Some(text), _) => parse_list(text)?,
        (None, true) => DESK_DIMS.to_vec(),
        (None, false) => parse_list(DEFAULT_DIMS)?,
    };
    if let Some(&d) = dims.iter().find(|&&d| !(MIN_LATENT..=MAX_LATENT).contains(&d)) {
        return Err(CliError::Usage(format!(
            "latent dimension {d} outside [{MIN_LATENT}, {MAX_LATENT}]"
        )));
    }
    let epochs = args
        .epochs
        .unwrap_or(if args.desk { DESK_EPOCHS } else { DEFAULT_EPOCHS });
    let mut config = TrainingConfig::with_epochs(epochs);
    if let Some(text) = &args.checkpoints {
        let mut set: BTreeSet<usize> = parse_list(text)?.into_iter().collect();
        set.insert(0);
        if let Some(&e) = set.iter().find(|&&e| e > epochs) {
            return Err(CliError::Usage(format!(
                "checkpoint epoch {e} is beyond --epochs {epochs}"
            )));
        }
        config.checkpoint_epochs = set;
    }
    config.seed = args.seed;
    config.batch_size = args.batch_size;
    config.learning_rate = args.lr;
    config.optimizer = match args.optimizer {
        OptimizerArg::Adam => Optimizer::ADAM_DEFAULT,
        OptimizerArg::Sgd => Optimizer::Sgd,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let samples = args.data.samples.or(args.desk.then_some(DESK_SAMPLES));
    Ok(TrainPlan {
        dims,
        config,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub run_id: String,
    pub checkpoints: Vec<PathBuf>,
    pub losses: Vec<LossRow>,
}

/// Trains one model per latent dimension, in order, and writes every
/// requested checkpoint plus a per-dimension loss table. Existing
/// checkpoint files are never replaced.
pub fn execute(args: &TrainArgs) -> anyhow::Result<TrainOutcome> {
    let plan = plan(args)?;
    let dir = args.out.join(CHECKPOINT_DIR);
    let mut targets = Vec::new();
    for &d in &plan.dims {
        for &e in &plan.config.checkpoint_epochs {
            targets.push(dir.join(Checkpoint::file_name(d, e)));
        }
        targets.push(dir.join(format!("losses_d{d}.csv")));
    }
    let existing: Vec<String> = targets
        .iter()
        .filter(|p| p.exists())
        .map(|p| p.display().to_string())
        .collect();
    if !existing.is_empty() {
        return Err(CliError::Usage(format!(
            "refusing to overwrite existing files: {}",
            existing.join(", ")
        ))
        .into());
    }

    let data_args = crate::args::DataArgs {
        samples: plan.samples,
        ..args.data.clone()
    };
    let (data, label) = dataset::load(&data_args, None)?;

    let mut manifest = RunManifest::new(CommandKind::Train);
    manifest.seeds = vec![plan.config.seed];
    manifest.dataset = Some(label);
    manifest.latent_dims = plan.dims.clone();
    manifest.epochs = plan.config.checkpoint_epochs.iter().copied().collect();
    manifest
        .set("total_epochs", plan.config.epochs)
        .set("batch_size", plan.config.batch_size)
        .set("learning_rate", plan.config.learning_rate)
        .set("optimizer", format!("{:?}", plan.config.optimizer));
    manifest.output = Some(args.out.clone());
    let run_id = manifest.run_id();

    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    manifest.write(&args.out)?;

    let mut outcome = TrainOutcome {
        run_id,
        checkpoints: Vec::new(),
        losses: Vec::new(),
    };
    for &d in &plan.dims {
        let run = train(init(d, plan.config.seed)?, &data.points, &plan.config)
            .with_context(|| format!("training latent dimension {d}"))?;
        for (epoch, params) in run.checkpoints {
            let ckpt = Checkpoint {
                epoch: epoch as u32,
                seed: plan.config.seed,
                params,
            };
            let path = dir.join(Checkpoint::file_name(d, epoch));
            ckpt.save(&path)
                .with_context(|| format!("writing {}", path.display()))?;
            outcome.checkpoints.push(path);
        }
        let rows: Vec<LossRow> = run
            .epoch_losses
            .iter()
            .enumerate()
            .map(|(epoch, &loss)| LossRow {
                latent_dim: d,
                epoch,
                loss,
            })
            .collect();
        let path = dir.join(format!("losses_d{d}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
        eprintln!(
            "d = {d}: loss {:.5} -> {:.5} over {} epochs",
            rows.first().map_or(f64::NAN, |r| r.loss),
            rows.last().map_or(f64::NAN, |r| r.loss),
            plan.config.epochs
        );
        outcome.losses.extend(rows);
    }
    Ok(outcome)
}
