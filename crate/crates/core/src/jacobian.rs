//! Chain-rule Jacobians of the encoder, the decoder and the two composed
//! maps: `J_I = D(f_dec ∘ f_enc)(x)` on input space and
//! `J_L = D(f_enc ∘ f_dec)(z)` on latent space, with `z = f_enc(x)`.
//!
//! ReLU contributes a diagonal Heaviside factor of its pre-activation (0 at
//! a kink) and the output tanh contributes `1 − tanh²`.

use crate::autoencoder::{
    forward, run_layers, ActivationCache, AutoencoderParams, ModelError, ACTIVATIONS, INPUT_DIM,
    LATENT_LAYER, LAYER_COUNT,
};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianKind {
    Latent,
    Input,
    EncoderOnly,
    DecoderOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianRequest {
    pub which: JacobianKind,
    /// A 784-vector, or a latent d-vector for `DecoderOnly`.
    pub point: Vec<f64>,
}

impl JacobianRequest {
    pub fn new(which: JacobianKind, point: Vec<f64>) -> Self {
        Self { which, point }
    }
}

/// Evaluates the requested Jacobian at the request's point.
pub fn jacobian(params: &AutoencoderParams, request: &JacobianRequest) -> Result<Matrix, ModelError> {
    let expected = match request.which {
        JacobianKind::DecoderOnly => params.latent_dim(),
        _ => INPUT_DIM,
    };
    if request.point.len() != expected {
        return Err(ModelError::InputLength {
            expected,
            actual: request.point.len(),
        });
    }
    Ok(match request.which {
        JacobianKind::DecoderOnly => decoder_jacobian_at(params, &request.point),
        kind => {
            let cache = forward(params, &request.point)?;
            match kind {
                JacobianKind::Latent => latent_jacobian(params, &cache),
                JacobianKind::Input => input_jacobian(params, &cache),
                JacobianKind::EncoderOnly => encoder_jacobian(params, &cache),
                JacobianKind::DecoderOnly => unreachable!(),
            }
        }
    })
}

fn scale_columns(m: &mut Matrix, factors: &[f64]) {
    let cols = m.cols();
    for row in m.as_mut_slice().chunks_mut(cols) {
        for (v, f) in row.iter_mut().zip(factors) {
            *v *= f;
        }
    }
}

fn scale_rows(m: &mut Matrix, factors: &[f64]) {
    for (i, &f) in factors.iter().enumerate() {
        if f != 1.0 {
            for v in m.row_mut(i) {
                *v *= f;
            }
        }
    }
}

fn derivative_diag(layer: usize, pre: &[f64]) -> Vec<f64> {
    pre.iter().map(|&p| ACTIVATIONS[layer].derivative(p)).collect()
}

/// `D f_enc(x) = A₄ D₃ A₃ D₂ A₂ D₁ A₁`, a d×784 matrix.
pub fn encoder_jacobian(params: &AutoencoderParams, cache: &ActivationCache) -> Matrix {
    let mut m = params.layer(LATENT_LAYER).weights.clone();
    for i in (0..LATENT_LAYER).rev() {
        scale_columns(&mut m, &derivative_diag(i, &cache.pre[i]));
        m = m
            .matmul(&params.layer(i).weights)
            .expect("layer shapes compose");
    }
    m
}

/// `D f_dec(z) = T A₈ D₇ A₇ D₆ A₆ D₅ A₅` from decoder pre-activations
/// (layers 5–8, in order).
fn decoder_chain(params: &AutoencoderParams, decoder_pre: &[Vec<f64>]) -> Matrix {
    let mut m = params.layer(LATENT_LAYER + 1).weights.clone();
    for (offset, pre) in decoder_pre.iter().enumerate() {
        let i = LATENT_LAYER + 1 + offset;
        if i > LATENT_LAYER + 1 {
            m = params
                .layer(i)
                .weights
                .matmul(&m)
                .expect("layer shapes compose");
        }
        scale_rows(&mut m, &derivative_diag(i, pre));
    }
    m
}

/// Decoder Jacobian at the latent point of a cached pass; 784×d.
pub fn decoder_jacobian(params: &AutoencoderParams, cache: &ActivationCache) -> Matrix {
    decoder_chain(params, &cache.pre[LATENT_LAYER + 1..])
}

/// Decoder Jacobian at an arbitrary latent point `z`.
pub fn decoder_jacobian_at(params: &AutoencoderParams, z: &[f64]) -> Matrix {
    let (pre, _) = run_layers(params, LATENT_LAYER + 1, z);
    decoder_chain(params, &pre)
}

/// `J_L = D f_enc(y) · D f_dec(z)`: the decoder factors come from the cached
/// pass `z → y`, the encoder factors from a fresh pass at `y`. d×d.
pub fn latent_jacobian(params: &AutoencoderParams, cache: &ActivationCache) -> Matrix {
    let dec = decoder_jacobian(params, cache);
    let (enc_pre, _) = run_layers(params, 0, cache.reconstruction());
    let mut m = dec;
    for i in 0..=LATENT_LAYER {
        m = params
            .layer(i)
            .weights
            .matmul(&m)
            .expect("layer shapes compose");
        if i < LATENT_LAYER {
            scale_rows(&mut m, &derivative_diag(i, &enc_pre[i]));
        }
    }
    m
}

/// `J_I = D f_dec(z) · D f_enc(x)`, 784×784 with rank at most d.
pub fn input_jacobian(params: &AutoencoderParams, cache: &ActivationCache) -> Matrix {
    decoder_jacobian(params, cache)
        .matmul(&encoder_jacobian(params, cache))
        .expect("d×784 and 784×d compose")
}

/// All diagonal derivative factors along a cached pass, for layers with a
/// nonlinearity.
pub fn diagonal_factors(cache: &ActivationCache) -> Vec<Vec<f64>> {
    (0..LAYER_COUNT)
        .filter(|&i| i != LATENT_LAYER)
        .map(|i| derivative_diag(i, &cache.pre[i]))
        .collect()
}

/// Smallest |pre-activation| over ReLU layers; finite differences are only
/// meaningful when this is well above the step size.
pub fn kink_margin(cache: &ActivationCache) -> f64 {
    (0..LAYER_COUNT)
        .filter(|&i| ACTIVATIONS[i] == crate::autoencoder::Activation::Relu)
        .flat_map(|i| cache.pre[i].iter())
        .fold(f64::INFINITY, |m, v| m.min(v.abs()))
}

/// Iterates `x ← f_dec(f_enc(x))` from `start` until successive iterates
/// differ by at most `tol` (max norm). Returns the point and the number of
/// steps, or `None` if `max_steps` is exhausted.
pub fn reconstruction_fixed_point(
    params: &AutoencoderParams,
    start: &[f64],
    tol: f64,
    max_steps: usize,
) -> Result<Option<(Vec<f64>, usize)>, ModelError> {
    let mut x = start.to_vec();
    for step in 1..=max_steps {
        let y = crate::autoencoder::reconstruct(params, &x)?;
        let diff = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = y;
        if diff <= tol {
            return Ok(Some((x, step)));
        }
    }
    Ok(None)
}
