#![allow(dead_code)]

use ae_spectra::autoencoder::{forward, AutoencoderParams, Activation, ACTIVATIONS, INPUT_DIM, LATENT_LAYER};
use ae_spectra::jacobian::kink_margin;
use ae_spectra::linalg::Matrix;
use ae_spectra::rng::{self, Gaussian};
use num_complex::Complex64;

pub fn uniform_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng::stream(seed, 77);
    Matrix::from_fn(rows, cols, |_, _| rng::uniform(&mut r, -1.0, 1.0))
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng::stream(seed, 78);
    let mut g = Gaussian::new();
    Matrix::from_fn(rows, cols, |_, _| g.sample(&mut r))
}

pub fn uniform_vector(len: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, 79);
    (0..len).map(|_| rng::uniform(&mut r, lo, hi)).collect()
}

/// Characteristic polynomial coefficients `c[0] + c[1] x + … + x^n` by
/// Faddeev–LeVerrier.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&m).unwrap();
        for i in 0..n {
            next.as_mut_slice()[i * n + i] += c[n - k + 1];
        }
        m = next;
        let am = a.matmul(&m).unwrap();
        c[n - k] = -am.trace().unwrap() / k as f64;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &coef in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + coef;
    }
    (p, dp)
}

fn newton(c: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp) = horner(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-17 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Roots of a monic real polynomial by complex Newton iteration with
/// deflation, each root polished against the original polynomial.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let original: Vec<Complex64> = coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut work = original.clone();
    let mut roots = Vec::new();
    while work.len() > 1 {
        let mut z = newton(&work, Complex64::new(0.4, 0.9), 500);
        z = newton(&original, z, 50);
        roots.push(z);
        // synthetic division by (x − z)
        let n = work.len() - 1;
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        q[n - 1] = work[n];
        for i in (1..n).rev() {
            q[i - 1] = work[i] + z * q[i];
        }
        work = q;
    }
    roots
}

/// Random orthogonal matrix from a modified Gram–Schmidt QR of a Gaussian
/// matrix, reorthogonalised once.
pub fn random_orthogonal(n: usize, seed: u64) -> Matrix {
    let g = gaussian_matrix(n, n, seed);
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let d: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v -= d * q;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Smallest |pre-activation| over every ReLU unit on the pass at `x` and on
/// the encoder pass at the reconstruction.
pub fn full_margin(params: &AutoencoderParams, x: &[f64]) -> f64 {
    let cache = forward(params, x).unwrap();
    let again = forward(params, cache.reconstruction()).unwrap();
    let encoder_again = (0..LATENT_LAYER)
        .flat_map(|i| again.pre[i].iter())
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    kink_margin(&cache).min(encoder_again)
}

/// Nudges biases of near-kink ReLU units until every unit on the pass at `x`
/// and on the encoder pass at its reconstruction clears `margin`.
pub fn clear_kinks(params: &mut AutoencoderParams, x: &[f64], margin: f64) {
    for _ in 0..100 {
        if full_margin(params, x) > margin {
            return;
        }
        for probe in 0..2 {
            let cache = forward(params, x).unwrap();
            let point = if probe == 0 {
                x.to_vec()
            } else {
                cache.reconstruction().to_vec()
            };
            let pass = forward(params, &point).unwrap();
            let layers: Vec<usize> = if probe == 0 {
                (0..ACTIVATIONS.len()).collect()
            } else {
                (0..LATENT_LAYER).collect()
            };
            for i in layers {
                if ACTIVATIONS[i] != Activation::Relu {
                    continue;
                }
                for (j, &p) in pass.pre[i].iter().enumerate() {
                    if p.abs() <= 2.0 * margin {
                        let shift = if p >= 0.0 { 4.0 * margin } else { -4.0 * margin };
                        params.layers_mut()[i].biases[j] += shift;
                    }
                }
            }
        }
    }
    panic!("could not clear kinks: margin {}", full_margin(params, x));
}

pub fn input_point(seed: u64) -> Vec<f64> {
    uniform_vector(INPUT_DIM, -1.0, 1.0, seed)
}
