//! Random-matrix ensembles and their limiting spectral laws.
//!
//! Samplers are pure functions of `(size, seed)`. Reference laws are exposed
//! as densities and as one-dimensional CDFs of the squared modulus, the
//! folded argument, or the real part, which is what the goodness-of-fit
//! checks compare against.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigenvalues, LinalgError, Matrix, Spectrum};
use crate::rng::{self, Gaussian};
use crate::spectra::{ks_statistic, EsdSample};

/// Layer widths that follow the latent space in the autoencoder, in order.
pub const AUTOENCODER_WIDTHS: [usize; 7] = [32, 64, 128, 784, 128, 64, 32];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RmtError {
    #[error("invalid chain dimensions {dims:?}: {reason}")]
    InvalidChain { dims: Vec<usize>, reason: &'static str },
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Dimensions `n₁, …, n_k` of a rectangular chain `n₁×n₂, …, n_k×n₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainSpec {
    dims: Vec<usize>,
}

impl ChainSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self, RmtError> {
        let Some(&first) = dims.first() else {
            return Err(RmtError::InvalidChain {
                dims,
                reason: "at least one dimension is required",
            });
        };
        if dims.contains(&0) {
            return Err(RmtError::InvalidChain {
                dims,
                reason: "dimensions must be positive",
            });
        }
        if dims.iter().any(|&n| n < first) {
            return Err(RmtError::InvalidChain {
                dims,
                reason: "the first dimension must be the smallest",
            });
        }
        Ok(Self { dims })
    }

    /// The chain traced by the latent Jacobian of the 784-128-64-32-d
    /// autoencoder: `(d, 32, 64, 128, 784, 128, 64, 32)`.
    pub fn autoencoder(latent_dim: usize) -> Result<Self, RmtError> {
        let mut dims = vec![latent_dim];
        dims.extend_from_slice(&AUTOENCODER_WIDTHS);
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn n1(&self) -> usize {
        self.dims[0]
    }

    /// `α_j = n_j / n₁` for `j = 2..=k`.
    pub fn alphas(&self) -> Vec<f64> {
        let n1 = self.n1() as f64;
        self.dims[1..].iter().map(|&n| n as f64 / n1).collect()
    }

    /// Shapes `n_j × n_{j+1}` with `n_{k+1} = n₁`.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        let k = self.k();
        (0..k).map(|j| (self.dims[j], self.dims[(j + 1) % k])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Law {
    Semicircle,
    Circular,
    ProductSquare(usize),
    RectChain(ChainSpec),
}

impl Law {
    pub fn name(&self) -> String {
        match self {
            Law::Semicircle => "semicircle".into(),
            Law::Circular => "circular".into(),
            Law::ProductSquare(m) => format!("product{m}"),
            Law::RectChain(spec) => {
                let dims: Vec<String> = spec.dims().iter().map(|d| d.to_string()).collect();
                format!("chain({})", dims.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSample {
    pub law: Law,
    pub matrix_order: usize,
    pub seed: u64,
    pub spectrum: Spectrum,
}

/// n×n matrix with i.i.d. U[−1, 1] entries.
pub fn sample_uniform_matrix(n: usize, seed: u64) -> Matrix {
    let mut rng = rng::stream(seed, 0);
    Matrix::from_fn(n, n, |_, _| rng::uniform(&mut rng, -1.0, 1.0))
}

/// Symmetric n×n matrix whose upper triangle (diagonal included) is i.i.d.
/// standard Gaussian.
pub fn sample_wigner(n: usize, seed: u64) -> Matrix {
    let mut rng = rng::stream(seed, 1);
    let mut g = Gaussian::new();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = g.sample(&mut rng);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Matrices of shapes `n_j × n_{j+1}` with i.i.d. standard Gaussian entries.
pub fn sample_gaussian_chain(spec: &ChainSpec, seed: u64) -> Vec<Matrix> {
    let mut rng = rng::stream(seed, 2);
    let mut g = Gaussian::new();
    spec.shapes()
        .into_iter()
        .map(|(r, c)| Matrix::from_fn(r, c, |_, _| g.sample(&mut rng)))
        .collect()
}

fn chain_product(matrices: &[Matrix], factor: f64) -> Result<Matrix, LinalgError> {
    let mut iter = matrices.iter();
    let first = iter.next().expect("chain has at least one matrix");
    let mut acc = first.scale(factor);
    for m in iter {
        acc = acc.matmul(&m.scale(factor))?;
    }
    Ok(acc)
}

/// Draws the scaled ensemble for `law` and returns its spectrum. `n` is the
/// matrix order; for `RectChain` it is ignored in favour of `n₁`.
pub fn sample_law(law: &Law, n: usize, seed: u64) -> Result<LawSample, RmtError> {
    if n == 0 {
        return Err(RmtError::Domain {
            what: "matrix order",
            value: 0.0,
        });
    }
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let (matrix, order) = match law {
        Law::Semicircle => (sample_wigner(n, seed).scale(inv_sqrt_n), n),
        Law::Circular => (sample_uniform_matrix(n, seed).scale(inv_sqrt_n), n),
        Law::ProductSquare(m) => {
            if *m == 0 {
                return Err(RmtError::Domain {
                    what: "product length",
                    value: 0.0,
                });
            }
            let spec = ChainSpec::new(vec![n; *m])?;
            (chain_product(&sample_gaussian_chain(&spec, seed), inv_sqrt_n)?, n)
        }
        Law::RectChain(spec) => {
            let f = 1.0 / (spec.n1() as f64).sqrt();
            (chain_product(&sample_gaussian_chain(spec, seed), f)?, spec.n1())
        }
    };
    Ok(LawSample {
        law: law.clone(),
        matrix_order: order,
        seed,
        spectrum: eigenvalues(&matrix)?,
    })
}

/// Wigner semicircle density `(1/2π)√(4−x²)` on `|x| ≤ 2`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

/// Limiting density of the m-fold product of scaled square Gaussian
/// matrices, `1 / (π m |z|^{2(m−1)/m})` inside the closed unit disc.
pub fn product_law_density(m: usize, re: f64, im: f64) -> Result<f64, RmtError> {
    if m == 0 {
        return Err(RmtError::Domain {
            what: "product length",
            value: 0.0,
        });
    }
    let r2 = re * re + im * im;
    if r2 > 1.0 {
        return Ok(0.0);
    }
    let exponent = (m as f64 - 1.0) / m as f64;
    Ok(1.0 / (PI * m as f64 * r2.powf(exponent)))
}

/// CDF of |λ|² for the uniform law on the disc of the given radius.
pub fn disc_sq_modulus_cdf(radius: f64, s: f64) -> f64 {
    (s / (radius * radius)).clamp(0.0, 1.0)
}

/// CDF of the folded argument under a rotation-invariant law: uniform on [0, π].
pub fn uniform_argument_cdf(theta: f64) -> f64 {
    (theta / PI).clamp(0.0, 1.0)
}

/// CDF of |λ|² under the m-fold product law, i.e. of `U^m`.
pub fn product_sq_modulus_cdf(m: usize, s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s.powf(1.0 / m as f64)
    }
}

/// `U · Π_j (U − 1 + α_j)`, the limiting |λ|² law of a scaled rectangular
/// chain, as a function of the uniform variate.
pub fn chain_sq_modulus(spec: &ChainSpec, u: f64) -> f64 {
    spec.alphas()
        .iter()
        .fold(u, |acc, &a| acc * (u - 1.0 + a))
}

/// CDF of the chain |λ|² law, by inverting the increasing map `u ↦ chain_sq_modulus`.
pub fn chain_sq_modulus_cdf(spec: &ChainSpec, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= chain_sq_modulus(spec, 1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chain_sq_modulus(spec, mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Quantile `u` of the squared eigenvalue modulus predicted for a product of
/// U[−1/√n_j, 1/√n_j] matrices along `spec`:
/// `3^{−k} · u · Π_j ((u − 1)/α_j + 1)`.
pub fn predicted_sq_modulus(spec: &ChainSpec, u: f64) -> Result<f64, RmtError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(RmtError::Domain {
            what: "quantile",
            value: u,
        });
    }
    let scale = 3f64.powi(-(spec.k() as i32));
    let body = spec
        .alphas()
        .iter()
        .fold(u, |acc, &a| acc * ((u - 1.0) / a + 1.0));
    Ok(scale * body)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusStats {
    pub median: f64,
    pub max: f64,
}

/// Predicted median and maximum eigenvalue modulus (not squared).
pub fn predicted_modulus_stats(spec: &ChainSpec) -> ModulusStats {
    let at = |u| predicted_sq_modulus(spec, u).expect("u is in [0, 1]").sqrt();
    ModulusStats {
        median: at(0.5),
        max: at(1.0),
    }
}

/// I.i.d. draws from the predicted squared-modulus law.
pub fn sample_predicted_distribution(
    spec: &ChainSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>, RmtError> {
    if count == 0 {
        return Err(RmtError::Domain {
            what: "sample count",
            value: 0.0,
        });
    }
    let mut rng = rng::stream(seed, 3);
    (0..count)
        .map(|_| predicted_sq_modulus(spec, rng::uniform(&mut rng, 0.0, 1.0)))
        .collect()
}

/// Goodness-of-fit of an empirical spectral distribution against the
/// limiting law. Fields that do not apply to the law are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawFit {
    pub eigen_count: usize,
    /// KS distance of the real parts against the semicircle CDF.
    pub ks_real: Option<f64>,
    /// KS distance of |λ|² against the radial law.
    pub ks_sq_modulus: Option<f64>,
    /// KS distance of folded arguments against U[0, π].
    pub ks_argument: Option<f64>,
    /// `√(2·mean|λ|²)`, the radius of a uniform disc with the same second moment.
    pub radius_estimate: f64,
    /// Fraction of moduli beyond `limit_radius + 0.05`.
    pub frac_outside: f64,
    pub limit_radius: f64,
}

/// Support radius of the limiting law (semicircle: half-width).
pub fn limit_radius(law: &Law) -> f64 {
    match law {
        Law::Semicircle => 2.0,
        Law::Circular => 1.0 / 3f64.sqrt(),
        Law::ProductSquare(_) => 1.0,
        Law::RectChain(spec) => chain_sq_modulus(spec, 1.0).sqrt(),
    }
}

pub fn assess(law: &Law, esd: &EsdSample) -> LawFit {
    let sq = esd.squared_moduli();
    let radius = limit_radius(law);
    let mean_sq = sq.iter().sum::<f64>() / sq.len().max(1) as f64;
    let outside = sq.iter().filter(|s| s.sqrt() > radius + 0.05).count();
    let mut fit = LawFit {
        eigen_count: esd.len(),
        ks_real: None,
        ks_sq_modulus: None,
        ks_argument: None,
        radius_estimate: (2.0 * mean_sq).sqrt(),
        frac_outside: outside as f64 / sq.len().max(1) as f64,
        limit_radius: radius,
    };
    match law {
        Law::Semicircle => {
            fit.ks_real = ks_statistic(&esd.real_parts(), semicircle_cdf);
        }
        Law::Circular => {
            fit.ks_sq_modulus = ks_statistic(&sq, |s| disc_sq_modulus_cdf(radius, s));
            fit.ks_argument = ks_statistic(&esd.folded_arguments(), uniform_argument_cdf);
        }
        Law::ProductSquare(m) => {
            fit.ks_sq_modulus = ks_statistic(&sq, |s| product_sq_modulus_cdf(*m, s));
        }
        Law::RectChain(spec) => {
            fit.ks_sq_modulus = ks_statistic(&sq, |s| chain_sq_modulus_cdf(spec, s));
        }
    }
    fit
}

impl LawSample {
    pub fn assess(&self) -> LawFit {
        assess(&self.law, &EsdSample::new(&self.spectrum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_validation() {
        assert!(ChainSpec::new(vec![]).is_err());
        assert!(ChainSpec::new(vec![4, 2]).is_err());
        assert!(ChainSpec::new(vec![4, 0]).is_err());
        let spec = ChainSpec::new(vec![4, 8]).unwrap();
        assert_eq!(spec.alphas(), vec![2.0]);
        assert_eq!(spec.shapes(), vec![(4, 8), (8, 4)]);
        let ae = ChainSpec::autoencoder(2).unwrap();
        assert_eq!(ae.k(), 8);
        assert_eq!(ae.dims(), &[2, 32, 64, 128, 784, 128, 64, 32]);
    }

    #[test]
    fn samplers_are_deterministic() {
        assert_eq!(sample_uniform_matrix(16, 3), sample_uniform_matrix(16, 3));
        assert_ne!(sample_uniform_matrix(16, 3), sample_uniform_matrix(16, 4));
        let spec = ChainSpec::new(vec![3, 5]).unwrap();
        assert_eq!(sample_gaussian_chain(&spec, 9), sample_gaussian_chain(&spec, 9));
    }

    #[test]
    fn chain_shapes_and_square_product() {
        let spec = ChainSpec::new(vec![4, 8]).unwrap();
        let mats = sample_gaussian_chain(&spec, 0);
        assert_eq!(mats[0].shape(), (4, 8));
        assert_eq!(mats[1].shape(), (8, 4));
        assert_eq!(chain_product(&mats, 1.0).unwrap().shape(), (4, 4));
        let sample = sample_law(&Law::RectChain(spec), 999, 0).unwrap();
        assert_eq!(sample.spectrum.len(), 4);
        assert_eq!(sample.matrix_order, 4);
    }

    #[test]
    fn wigner_is_symmetric_with_real_spectrum() {
        let w = sample_wigner(40, 5);
        assert_eq!(w, w.transpose());
        let spec = eigenvalues(&w).unwrap();
        assert!(spec.values().iter().all(|v| v.im.abs() < 1e-9));
    }

    #[test]
    fn semicircle_density_values() {
        assert!((semicircle_density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert_eq!(semicircle_density(3.0), 0.0);
    }

    #[test]
    fn semicircle_cdf_matches_quadrature() {
        // composite Simpson on the density
        let n = 20_000;
        let h = 4.0 / n as f64;
        let mut acc = 0.0;
        let mut max_err = 0.0f64;
        for i in 0..n {
            let a = -2.0 + i as f64 * h;
            let m = a + h / 2.0;
            let b = a + h;
            acc += h / 6.0
                * (semicircle_density(a) + 4.0 * semicircle_density(m) + semicircle_density(b));
            max_err = max_err.max((acc - semicircle_cdf(b)).abs());
        }
        assert!((acc - 1.0).abs() < 1e-6, "{acc}");
        assert!(max_err < 1e-6, "{max_err}");
    }

    #[test]
    fn product_density_values() {
        assert!((product_law_density(1, 0.3, -0.4).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(product_law_density(3, 1.1, 0.0).unwrap(), 0.0);
        // a² + b² = 1.21
        assert_eq!(product_law_density(2, 0.0, 1.1).unwrap(), 0.0);
        // m = 2 at a² + b² = 0.25: 1 / (2π · 0.25^{1/2}) = 1/π
        let g = product_law_density(2, 0.3, 0.4).unwrap();
        assert!((g - 1.0 / PI).abs() < 1e-14, "{g}");
        assert!(product_law_density(0, 0.1, 0.1).is_err());
    }

    #[test]
    fn product_radial_cdf_is_consistent_with_density() {
        // P(|z|² ≤ s) = ∫_0^{√s} g(r) 2πr dr
        for m in 1..=3 {
            let s: f64 = 0.37;
            let steps = 200_000;
            let rmax = s.sqrt();
            let h = rmax / steps as f64;
            let mut acc = 0.0;
            for i in 0..steps {
                let r = (i as f64 + 0.5) * h;
                acc += product_law_density(m, r, 0.0).unwrap() * 2.0 * PI * r * h;
            }
            assert!((acc - product_sq_modulus_cdf(m, s)).abs() < 1e-3, "m={m} {acc}");
        }
    }

    #[test]
    fn chain_cdf_inverts_the_quantile_map() {
        let spec = ChainSpec::new(vec![8, 16]).unwrap();
        for u in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let s = chain_sq_modulus(&spec, u);
            assert!((chain_sq_modulus_cdf(&spec, s) - u).abs() < 1e-9);
        }
        // α = 2: U(U + 1) = s  ⇒  U = (√(1+4s) − 1)/2
        let s: f64 = 0.8;
        let closed = ((1.0 + 4.0 * s).sqrt() - 1.0) / 2.0;
        assert!((chain_sq_modulus_cdf(&spec, s) - closed).abs() < 1e-12);
    }

    #[test]
    fn predicted_values_at_quantiles() {
        for n1 in [2, 7, 20] {
            let spec = ChainSpec::autoencoder(n1).unwrap();
            let top = predicted_sq_modulus(&spec, 1.0).unwrap();
            assert!((top - 1.0 / 6561.0).abs() < 1e-18);
            assert_eq!(predicted_sq_modulus(&spec, 0.0).unwrap(), 0.0);
            assert!((predicted_modulus_stats(&spec).max - 1.0 / 81.0).abs() < 1e-15);
        }
        // direct substitution of u = 0.5 into the closed form, n₁ = 2 and 20
        let direct = |n1: f64| {
            let f = |n: f64| (n1 / n) * -0.5 + 1.0;
            0.5 / 6561.0
                * f(32.0).powi(2)
                * f(64.0).powi(2)
                * f(128.0).powi(2)
                * f(784.0)
        };
        for n1 in [2usize, 20] {
            let spec = ChainSpec::autoencoder(n1).unwrap();
            let v = predicted_sq_modulus(&spec, 0.5).unwrap();
            assert!((v - direct(n1 as f64)).abs() < 1e-18, "{v}");
        }
        assert!(predicted_sq_modulus(&ChainSpec::autoencoder(2).unwrap(), 1.5).is_err());
        assert!(predicted_sq_modulus(&ChainSpec::autoencoder(2).unwrap(), -0.1).is_err());
    }

    #[test]
    fn predicted_draws_respect_bounds_and_median() {
        let spec = ChainSpec::autoencoder(2).unwrap();
        let mut draws = sample_predicted_distribution(&spec, 100_000, 1).unwrap();
        let cap = 3f64.powi(-8);
        assert!(draws.iter().all(|&v| (0.0..=cap).contains(&v)));
        draws.sort_by(f64::total_cmp);
        let median = draws[draws.len() / 2];
        let target = predicted_sq_modulus(&spec, 0.5).unwrap();
        assert!((median / target - 1.0).abs() < 0.05, "{median} vs {target}");
        assert!(sample_predicted_distribution(&spec, 0, 1).is_err());
    }
}
