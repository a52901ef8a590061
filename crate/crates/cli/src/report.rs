use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use ae_spectra::spectra::SpectralSummary;
use anyhow::Context;

use crate::analyze::{read_records, SummaryRecord, SUMMARY_JSON};
use crate::args::{parse_list, ReportArgs};
use crate::error::CliError;
use crate::manifest::ensure_writable;
use crate::svg::{box_plot, Axis};

pub const ZOOM_FILE: &str = "modulus_e0_zoom.svg";

fn argument_axis() -> Axis {
    Axis {
        min: 0.0,
        max: PI,
        ticks: vec![
            (0.0, "0".into()),
            (PI / 4.0, "π/4".into()),
            (PI / 2.0, "π/2".into()),
            (3.0 * PI / 4.0, "3π/4".into()),
            (PI, "π".into()),
        ],
        label: "folded argument |θ|".into(),
    }
}

fn largest_modulus(s: &SpectralSummary) -> f64 {
    s.modulus.quantiles.max.max(s.modulus.whisker_high)
}

/// Renders every figure in memory: file name → SVG text.
pub fn render(
    cells: &BTreeMap<(usize, usize), SummaryRecord>,
    dims: &[usize],
    epochs: &[usize],
) -> BTreeMap<String, String> {
    let jacobian = cells
        .values()
        .next()
        .map_or("latent", |r| r.jacobian.as_str());
    let symbol = if jacobian == "input" { "J_I" } else { "J_L" };
    let shared_max = cells.values().map(|r| largest_modulus(&r.summary)).fold(0.0, f64::max);
    let shared = Axis::linear(0.0, shared_max * 1.05, "|λ|");
    let mut files = BTreeMap::new();

    for &e in epochs {
        let row = |d: usize| cells.get(&(d, e)).map(|r| &r.summary);
        let modulus: Vec<(String, _)> = dims
            .iter()
            .map(|&d| (d.to_string(), row(d).map(|s| &s.modulus)))
            .collect();
        files.insert(
            format!("modulus_e{e}.svg"),
            box_plot(
                &format!("|λ| of {symbol}, epoch {e}"),
                "latent dimension",
                &shared,
                &modulus,
            ),
        );
        let argument: Vec<(String, _)> = dims
            .iter()
            .map(|&d| (d.to_string(), row(d).and_then(|s| s.argument.as_ref())))
            .collect();
        files.insert(
            format!("argument_e{e}.svg"),
            box_plot(
                &format!("folded argument of {symbol}, epoch {e}"),
                "latent dimension",
                &argument_axis(),
                &argument,
            ),
        );
        if e == 0 {
            let zoom_max = dims
                .iter()
                .filter_map(|&d| row(d))
                .map(largest_modulus)
                .fold(0.0, f64::max);
            files.insert(
                ZOOM_FILE.to_string(),
                box_plot(
                    &format!("|λ| of {symbol}, epoch 0 (own scale)"),
                    "latent dimension",
                    &Axis::linear(0.0, zoom_max * 1.05, "|λ|"),
                    &modulus,
                ),
            );
        }
    }
    files
}

pub fn execute(args: &ReportArgs) -> anyhow::Result<Vec<PathBuf>> {
    let json = args.summary.join(SUMMARY_JSON);
    let records = read_records(&json)?;
    if records.is_empty() {
        return Err(CliError::Data(format!(
            "no summaries found in {} (run `analyze` first)",
            json.display()
        ))
        .into());
    }
    let mut cells: BTreeMap<(usize, usize), SummaryRecord> = BTreeMap::new();
    for r in records {
        cells.insert((r.summary.latent_dim, r.summary.epoch), r);
    }
    let dims: Vec<usize> = match &args.dims {
        Some(t) => parse_list(t)?,
        None => cells.keys().map(|k| k.0).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    let epochs: Vec<usize> = match &args.epochs {
        Some(t) => parse_list(t)?,
        None => cells.keys().map(|k| k.1).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    let missing: Vec<String> = epochs
        .iter()
        .flat_map(|&e| dims.iter().map(move |&d| (d, e)))
        .filter(|k| !cells.contains_key(k))
        .map(|(d, e)| format!("d={d}/epoch={e}"))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Data(format!("missing summaries for {}", missing.join(", "))).into());
    }
    cells.retain(|(d, e), _| dims.contains(d) && epochs.contains(e));

    let files = render(&cells, &dims, &epochs);
    let paths: Vec<PathBuf> = files.keys().map(|n| args.out.join(n)).collect();
    for p in &paths {
        ensure_writable(p, args.force)?;
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (path, text) in paths.iter().zip(files.values()) {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(paths)
}
