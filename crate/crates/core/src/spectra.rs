//! Empirical spectral statistics: folded arguments, box-plot summaries,
//! empirical spectral distribution functions and Kolmogorov–Smirnov distances.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Spectrum;

/// Eigenvalues with modulus below this are counted as zero and left out of
/// the argument statistics.
pub const ZERO_MODULUS: f64 = 1e-12;
/// Whisker reach in multiples of the interquartile range.
pub const WHISKER_IQR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("cannot summarise an empty collection of eigenvalues")]
    Empty,
    #[error("non-finite eigenvalue {0}")]
    NonFinite(Complex64),
}

/// |arg(λ)| in [0, π]: conjugates share a value, positive reals map to 0
/// and negative reals to π. Exact zero maps to 0.
pub fn fold_argument(value: Complex64) -> f64 {
    if value.re == 0.0 && value.im == 0.0 {
        return 0.0;
    }
    value.im.atan2(value.re).abs()
}

/// Linear interpolation between order statistics (type 7). `sorted` must be
/// ascending and nonempty; `p` is clamped to [0, 1].
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub p95: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn from_sorted(sorted: &[f64]) -> Option<Self> {
        if sorted.is_empty() {
            return None;
        }
        Some(Self {
            min: sorted[0],
            q25: quantile_sorted(sorted, 0.25),
            median: quantile_sorted(sorted, 0.5),
            q75: quantile_sorted(sorted, 0.75),
            p95: quantile_sorted(sorted, 0.95),
            max: sorted[sorted.len() - 1],
        })
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.min, self.q25, self.median, self.q75, self.p95, self.max]
    }

    pub fn is_monotone(&self) -> bool {
        self.as_array().windows(2).all(|w| w[0] <= w[1])
    }

    pub fn iqr(&self) -> f64 {
        self.q75 - self.q25
    }
}

/// Box-plot geometry for one sample under the 1.5·IQR rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub quantiles: Quantiles,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn from_sorted(sorted: &[f64]) -> Option<Self> {
        let quantiles = Quantiles::from_sorted(sorted)?;
        let reach = WHISKER_IQR * quantiles.iqr();
        let (lo_fence, hi_fence) = (quantiles.q25 - reach, quantiles.q75 + reach);
        let inside = |v: &&f64| **v >= lo_fence && **v <= hi_fence;
        let whisker_low = sorted.iter().find(inside).copied().unwrap_or(quantiles.q25);
        let whisker_high = sorted.iter().rev().find(inside).copied().unwrap_or(quantiles.q75);
        let outliers = sorted
            .iter()
            .copied()
            .filter(|v| *v < lo_fence || *v > hi_fence)
            .collect();
        Some(Self {
            quantiles,
            whisker_low,
            whisker_high,
            outliers,
        })
    }
}

/// Per-(epoch, latent dimension) summary of pooled eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub latent_dim: usize,
    pub epoch: usize,
    pub sample_points: usize,
    pub eigen_count: usize,
    pub zero_count: usize,
    pub modulus: BoxStats,
    /// `None` when every eigenvalue is (numerically) zero.
    pub argument: Option<BoxStats>,
}

impl SpectralSummary {
    pub fn modulus_quantiles(&self) -> &Quantiles {
        &self.modulus.quantiles
    }

    pub fn argument_quantiles(&self) -> Option<&Quantiles> {
        self.argument.as_ref().map(|a| &a.quantiles)
    }

    pub fn outlier_moduli(&self) -> &[f64] {
        &self.modulus.outliers
    }
}

/// Pools the eigenvalues of every spectrum and summarises moduli and folded
/// arguments.
pub fn summarize(
    spectra: &[Spectrum],
    epoch: usize,
    latent_dim: usize,
) -> Result<SpectralSummary, SpectraError> {
    let mut moduli = Vec::new();
    let mut arguments = Vec::new();
    let mut zero_count = 0;
    for v in spectra.iter().flat_map(|s| s.values()) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(SpectraError::NonFinite(*v));
        }
        let m = v.norm();
        moduli.push(m);
        if m < ZERO_MODULUS {
            zero_count += 1;
        } else {
            arguments.push(fold_argument(*v));
        }
    }
    if moduli.is_empty() {
        return Err(SpectraError::Empty);
    }
    moduli.sort_by(f64::total_cmp);
    arguments.sort_by(f64::total_cmp);
    Ok(SpectralSummary {
        latent_dim,
        epoch,
        sample_points: spectra.len(),
        eigen_count: moduli.len(),
        zero_count,
        modulus: BoxStats::from_sorted(&moduli).ok_or(SpectraError::Empty)?,
        argument: BoxStats::from_sorted(&arguments),
    })
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF of
/// `samples` and `cdf`. Returns `None` for an empty sample.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        sup = sup.max(above).max(below);
    }
    Some(sup)
}

/// Uniform-weight measure on an eigenvalue multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct EsdSample {
    values: Vec<Complex64>,
}

impl EsdSample {
    pub fn new(spectrum: &Spectrum) -> Self {
        Self {
            values: spectrum.values().to_vec(),
        }
    }

    pub fn pooled<'a>(spectra: impl IntoIterator<Item = &'a Spectrum>) -> Self {
        Self {
            values: spectra
                .into_iter()
                .flat_map(|s| s.values().iter().copied())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    /// Fraction of values with real part ≤ x and imaginary part ≤ y.
    pub fn cdf(&self, x: f64, y: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let count = self
            .values
            .iter()
            .filter(|v| v.re <= x && v.im <= y)
            .count();
        count as f64 / self.values.len() as f64
    }

    pub fn squared_moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Folded arguments of the values that are not numerically zero.
    pub fn folded_arguments(&self) -> Vec<f64> {
        self.values
            .iter()
            .filter(|v| v.norm() >= ZERO_MODULUS)
            .map(|v| fold_argument(*v))
            .collect()
    }
}

pub fn esd_cdf(sample: &EsdSample, x: f64, y: f64) -> f64 {
    sample.cdf(x, y)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties. `None` when the
/// lengths differ, fewer than two points are given, or a side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
