use std::path::{Path, PathBuf};

use ae_spectra::exec::{self, Workers};
use ae_spectra::rmt::{chain_sq_modulus_cdf, sample_law, ChainSpec, Law, LawSample};
use ae_spectra::spectra::{ks_statistic, EsdSample};
use anyhow::Context;
use serde::Serialize;

use crate::args::RmtVerifyArgs;
use crate::error::CliError;
use crate::manifest::{ensure_writable, CommandKind, RunManifest};

pub const ROWS_FILE: &str = "rmt_verify.csv";
pub const CHECKS_FILE: &str = "rmt_checks.csv";
pub const SCATTER_FILE: &str = "circular_scatter.csv";

pub const SEMICIRCLE_KS: f64 = 0.05;
pub const CIRCULAR_KS: f64 = 0.05;
pub const CIRCULAR_OUTSIDE: f64 = 0.02;
pub const RADIUS_REL_TOL: f64 = 0.05;
pub const PRODUCT_KS: f64 = 0.08;
pub const CHAIN_KS: f64 = 0.12;

#[derive(Debug, Clone, PartialEq)]
pub struct LawRun {
    pub law: Law,
    pub n: usize,
    pub seeds: Vec<u64>,
}

impl LawRun {
    pub fn new(law: Law, n: usize, first_seed: u64, count: u64) -> Self {
        Self {
            law,
            n,
            seeds: (first_seed..first_seed + count).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRow {
    pub law: String,
    pub n: usize,
    pub seed: u64,
    pub eigen_count: usize,
    pub ks_real: Option<f64>,
    pub ks_sq_modulus: Option<f64>,
    pub ks_argument: Option<f64>,
    pub radius_estimate: f64,
    pub limit_radius: f64,
    pub frac_outside: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub law: String,
    pub n: usize,
    pub seeds: usize,
    pub statistic: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ScatterRow {
    n: usize,
    seed: u64,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<SeedRow>,
    pub checks: Vec<Check>,
    pub samples: Vec<LawSample>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Semicircle at 128/256/512, circular at 512, square products m = 2, 3 at
/// 256 (10 seeds each) and the (8, 16) chain over 50 seeds.
pub fn default_suite(first_seed: u64) -> Vec<LawRun> {
    let mut runs: Vec<LawRun> = [128, 256, 512]
        .into_iter()
        .map(|n| LawRun::new(Law::Semicircle, n, first_seed, 10))
        .collect();
    runs.push(LawRun::new(Law::Circular, 512, first_seed, 10));
    for m in [2, 3] {
        runs.push(LawRun::new(Law::ProductSquare(m), 256, first_seed, 10));
    }
    let chain = ChainSpec::new(vec![8, 16]).expect("valid chain");
    runs.push(LawRun::new(Law::RectChain(chain), 8, first_seed, 50));
    runs
}

/// `semicircle`, `circular`, `product<M>` / `product:<M>`, `chain` (= 8,16)
/// or `chain:<n1>,<n2>,…`.
pub fn parse_law(text: &str) -> Result<Law, CliError> {
    let bad = |why: &str| CliError::Usage(format!("unknown law {text:?}: {why}"));
    let t = text.trim().to_ascii_lowercase();
    match t.as_str() {
        "semicircle" | "wigner" => return Ok(Law::Semicircle),
        "circular" | "circle" => return Ok(Law::Circular),
        "chain" => return Ok(Law::RectChain(ChainSpec::new(vec![8, 16]).expect("valid chain"))),
        _ => {}
    }
    if let Some(m) = t.strip_prefix("product") {
        let m: usize = m
            .trim_start_matches(':')
            .parse()
            .map_err(|_| bad("expected product<M>"))?;
        if m == 0 {
            return Err(bad("product length must be positive"));
        }
        return Ok(Law::ProductSquare(m));
    }
    if let Some(dims) = t.strip_prefix("chain:") {
        let dims: Vec<usize> = dims
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad("expected chain:n1,n2,...")))
            .collect::<Result<_, _>>()?;
        return ChainSpec::new(dims)
            .map(Law::RectChain)
            .map_err(|e| bad(&e.to_string()));
    }
    Err(bad("expected semicircle, circular, product<M> or chain[:dims]"))
}

fn default_order(law: &Law) -> usize {
    match law {
        Law::Semicircle | Law::Circular => 512,
        Law::ProductSquare(_) => 256,
        Law::RectChain(spec) => spec.n1(),
    }
}

fn default_seed_count(law: &Law) -> u64 {
    match law {
        Law::RectChain(_) => 50,
        _ => 10,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count.max(1) as f64
}

fn check(run: &LawRun, statistic: &str, value: f64, bound: f64, pass: bool) -> Check {
    Check {
        law: run.law.name(),
        n: run.n,
        seeds: run.seeds.len(),
        statistic: statistic.to_string(),
        value,
        bound,
        pass,
    }
}

fn checks_for(run: &LawRun, rows: &[SeedRow], samples: &[LawSample]) -> Vec<Check> {
    let mean_of = |f: fn(&SeedRow) -> Option<f64>| mean(rows.iter().filter_map(f));
    match &run.law {
        Law::Semicircle => {
            let ks = mean_of(|r| r.ks_real);
            vec![check(run, "mean_ks_real", ks, SEMICIRCLE_KS, ks < SEMICIRCLE_KS)]
        }
        Law::Circular => {
            let ks_sq = mean_of(|r| r.ks_sq_modulus);
            let ks_arg = mean_of(|r| r.ks_argument);
            let outside = mean(rows.iter().map(|r| r.frac_outside));
            let radius = mean(rows.iter().map(|r| r.radius_estimate));
            let limit = rows.first().map_or(0.0, |r| r.limit_radius);
            let rel = (radius - limit).abs() / limit;
            vec![
                check(run, "mean_ks_sq_modulus", ks_sq, CIRCULAR_KS, ks_sq < CIRCULAR_KS),
                check(run, "mean_ks_argument", ks_arg, CIRCULAR_KS, ks_arg < CIRCULAR_KS),
                check(run, "frac_outside", outside, CIRCULAR_OUTSIDE, outside <= CIRCULAR_OUTSIDE),
                check(run, "radius_rel_error", rel, RADIUS_REL_TOL, rel < RADIUS_REL_TOL),
            ]
        }
        Law::ProductSquare(_) => {
            let ks = mean_of(|r| r.ks_sq_modulus);
            vec![check(run, "mean_ks_sq_modulus", ks, PRODUCT_KS, ks < PRODUCT_KS)]
        }
        Law::RectChain(spec) => {
            let pooled = EsdSample::pooled(samples.iter().map(|s| &s.spectrum));
            let ks = ks_statistic(&pooled.squared_moduli(), |s| chain_sq_modulus_cdf(spec, s))
                .unwrap_or(1.0);
            vec![check(run, "pooled_ks_sq_modulus", ks, CHAIN_KS, ks < CHAIN_KS)]
        }
    }
}

/// Mean semicircle KS must fall as the order grows.
fn semicircle_trend(checks: &[Check]) -> Option<Check> {
    let mut by_n: Vec<(usize, f64, usize)> = checks
        .iter()
        .filter(|c| c.law == "semicircle" && c.statistic == "mean_ks_real")
        .map(|c| (c.n, c.value, c.seeds))
        .collect();
    if by_n.len() < 2 {
        return None;
    }
    by_n.sort_by_key(|t| t.0);
    let decreasing = by_n.windows(2).all(|w| w[1].1 < w[0].1);
    let last = by_n.last().expect("nonempty");
    Some(Check {
        law: "semicircle".into(),
        n: last.0,
        seeds: last.2,
        statistic: "ks_decreasing_in_n".into(),
        value: if decreasing { 1.0 } else { 0.0 },
        bound: 1.0,
        pass: decreasing,
    })
}

pub fn run_suite(runs: &[LawRun], workers: Workers) -> anyhow::Result<VerifyReport> {
    let mut report = VerifyReport {
        rows: Vec::new(),
        checks: Vec::new(),
        samples: Vec::new(),
    };
    for run in runs {
        let samples = exec::try_map(&run.seeds, workers, |&seed| sample_law(&run.law, run.n, seed))
            .with_context(|| format!("sampling {} at n = {}", run.law.name(), run.n))?;
        let rows: Vec<SeedRow> = samples
            .iter()
            .map(|s| {
                let fit = s.assess();
                SeedRow {
                    law: s.law.name(),
                    n: s.matrix_order,
                    seed: s.seed,
                    eigen_count: fit.eigen_count,
                    ks_real: fit.ks_real,
                    ks_sq_modulus: fit.ks_sq_modulus,
                    ks_argument: fit.ks_argument,
                    radius_estimate: fit.radius_estimate,
                    limit_radius: fit.limit_radius,
                    frac_outside: fit.frac_outside,
                }
            })
            .collect();
        report.checks.extend(checks_for(run, &rows, &samples));
        report.rows.extend(rows);
        report.samples.extend(samples);
    }
    if let Some(trend) = semicircle_trend(&report.checks) {
        report.checks.push(trend);
    }
    Ok(report)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn runs_from_args(args: &RmtVerifyArgs) -> Result<Vec<LawRun>, CliError> {
    match &args.law {
        None => {
            if args.n.is_some() {
                return Err(CliError::Usage("--n requires --law".into()));
            }
            let mut runs = default_suite(args.seed);
            if let Some(count) = args.seeds {
                for r in &mut runs {
                    r.seeds = (args.seed..args.seed + count).collect();
                }
            }
            Ok(runs)
        }
        Some(text) => {
            let law = parse_law(text)?;
            let n = args.n.unwrap_or_else(|| default_order(&law));
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let count = args.seeds.unwrap_or_else(|| default_seed_count(&law));
            if count == 0 {
                return Err(CliError::Usage("--seeds must be positive".into()));
            }
            let n = match &law {
                Law::RectChain(spec) => spec.n1(),
                _ => n,
            };
            Ok(vec![LawRun::new(law, n, args.seed, count)])
        }
    }
}

/// Runs the suite, writes the per-seed table, the checks and the circular
/// scatter, and fails with a numerical error naming every failed check.
pub fn execute(args: &RmtVerifyArgs, workers: Workers) -> anyhow::Result<VerifyReport> {
    let runs = runs_from_args(args)?;
    let paths: Vec<PathBuf> = [ROWS_FILE, CHECKS_FILE, SCATTER_FILE]
        .iter()
        .map(|f| args.out.join(f))
        .collect();
    for p in &paths {
        ensure_writable(p, args.force)?;
    }

    let report = run_suite(&runs, workers)?;

    let mut manifest = RunManifest::new(CommandKind::RmtVerify);
    manifest.seeds = runs.iter().flat_map(|r| r.seeds.iter().copied()).collect();
    manifest.seeds.sort_unstable();
    manifest.seeds.dedup();
    for r in &runs {
        manifest.set(&format!("{}@{}", r.law.name(), r.n), r.seeds.len());
    }
    manifest.output = Some(args.out.clone());
    manifest.workers = Some(workers.0);
    manifest.write(&args.out)?;

    write_csv(&paths[0], &report.rows)?;
    write_csv(&paths[1], &report.checks)?;
    let scatter: Vec<ScatterRow> = report
        .samples
        .iter()
        .filter(|s| s.law == Law::Circular)
        .flat_map(|s| {
            s.spectrum.values().iter().map(move |z| ScatterRow {
                n: s.matrix_order,
                seed: s.seed,
                re: z.re,
                im: z.im,
            })
        })
        .collect();
    write_csv(&paths[2], &scatter)?;

    let failures = report.failures();
    if !failures.is_empty() {
        let list: Vec<String> = failures
            .iter()
            .map(|c| format!("{} (n = {}): {} = {:.5} vs bound {}", c.law, c.n, c.statistic, c.value, c.bound))
            .collect();
        return Err(CliError::Numerical(format!("law check failed: {}", list.join("; "))).into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_names_parse() {
        assert_eq!(parse_law("semicircle").unwrap(), Law::Semicircle);
        assert_eq!(parse_law("Circular").unwrap(), Law::Circular);
        assert_eq!(parse_law("product3").unwrap(), Law::ProductSquare(3));
        assert_eq!(parse_law("product:2").unwrap(), Law::ProductSquare(2));
        assert_eq!(
            parse_law("chain:4,8,6").unwrap(),
            Law::RectChain(ChainSpec::new(vec![4, 8, 6]).unwrap())
        );
        assert!(parse_law("chain:8,4").is_err());
        assert!(parse_law("product0").is_err());
        assert!(parse_law("gue").is_err());
    }

    #[test]
    fn default_suite_contract() {
        let suite = default_suite(0);
        let names: Vec<(String, usize, usize)> = suite
            .iter()
            .map(|r| (r.law.name(), r.n, r.seeds.len()))
            .collect();
        assert_eq!(
            names,
            vec![
                ("semicircle".into(), 128, 10),
                ("semicircle".into(), 256, 10),
                ("semicircle".into(), 512, 10),
                ("circular".into(), 512, 10),
                ("product2".into(), 256, 10),
                ("product3".into(), 256, 10),
                ("chain(8,16)".into(), 8, 50),
            ]
        );
    }

    #[test]
    fn small_circular_run_has_one_row_per_seed() {
        let runs = vec![LawRun::new(Law::Circular, 64, 0, 4)];
        let report = run_suite(&runs, Workers::SEQUENTIAL).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.checks.len(), 4);
        assert!(report.rows.iter().all(|r| r.eigen_count == 64));
    }
}
