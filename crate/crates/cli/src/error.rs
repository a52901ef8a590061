use std::path::PathBuf;

use ae_spectra::autoencoder::ModelError;
use ae_spectra::checkpoint::CheckpointError;
use ae_spectra::data::DataError;
use ae_spectra::linalg::LinalgError;
use ae_spectra::rmt::RmtError;
use ae_spectra::spectra::SpectraError;
use thiserror::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("refusing to overwrite {0} (pass --force to replace it)")]
    Exists(PathBuf),
    #[error("{0}")]
    Data(String),
    #[error("CSV schema mismatch in {path}: found [{found}], expected [{expected}]")]
    Schema {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Exists(_) => EXIT_USAGE,
            CliError::Data(_) | CliError::Schema { .. } => EXIT_DATA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Exit code for an error chain: the first cause we can classify wins.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return e.exit_code();
        }
        if cause.is::<LinalgError>() || cause.is::<RmtError>() || cause.is::<SpectraError>() {
            return EXIT_NUMERICAL;
        }
        if let Some(e) = cause.downcast_ref::<ModelError>() {
            return match e {
                ModelError::NonFiniteLoss { .. } | ModelError::NonFiniteParameter { .. } => {
                    EXIT_NUMERICAL
                }
                ModelError::InvalidLatentDim(_) | ModelError::InvalidConfig(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            };
        }
        if cause.is::<DataError>()
            || cause.is::<CheckpointError>()
            || cause.is::<std::io::Error>()
            || cause.is::<csv::Error>()
            || cause.is::<serde_json::Error>()
        {
            return EXIT_DATA;
        }
    }
    EXIT_DATA
}
