//! Command-line front end for the spectra experiments.

pub mod analyze;
pub mod args;
pub mod dataset;
pub mod error;
pub mod manifest;
pub mod predict;
pub mod report;
pub mod rmt_verify;
pub mod svg;
pub mod train;

use ae_spectra::exec::Workers;

use crate::args::{Cli, Command};

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let workers = Workers(cli.workers);
    match cli.command {
        Command::RmtVerify(a) => {
            let report = rmt_verify::execute(&a, workers)?;
            eprintln!(
                "{} checks passed, results in {}",
                report.checks.len(),
                a.out.display()
            );
        }
        Command::Train(a) => {
            let out = train::execute(&a)?;
            eprintln!("run {}: {} checkpoints", out.run_id, out.checkpoints.len());
        }
        Command::Analyze(a) => {
            let out = analyze::execute(&a, workers)?;
            eprintln!("run {}: {} summaries", out.run_id, out.summaries.len());
        }
        Command::Predict(a) => {
            predict::execute(&a)?;
        }
        Command::Report(a) => {
            let files = report::execute(&a)?;
            eprintln!("wrote {} figures to {}", files.len(), a.out.display());
        }
    }
    Ok(())
}
