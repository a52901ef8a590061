//! The 784-128-64-32-d-32-64-128-784 autoencoder: initialisation, forward
//! pass with cached activations, hand-derived backpropagation and training.
//!
//! Layers 1–3 and 5–7 use ReLU, layer 4 (the latent map) is affine and
//! layer 8 ends in tanh, so reconstructions live in (−1, 1)^784.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dot, Matrix};
use crate::rng;

pub const INPUT_DIM: usize = 784;
pub const HIDDEN: [usize; 3] = [128, 64, 32];
pub const MIN_LATENT: usize = 2;
pub const MAX_LATENT: usize = 20;
pub const LAYER_COUNT: usize = 8;
/// Index of the affine latent layer (0-based).
pub const LATENT_LAYER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
    Tanh,
}

pub const ACTIVATIONS: [Activation; LAYER_COUNT] = [
    Activation::Relu,
    Activation::Relu,
    Activation::Relu,
    Activation::Identity,
    Activation::Relu,
    Activation::Relu,
    Activation::Relu,
    Activation::Tanh,
];

impl Activation {
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Identity => v,
            Activation::Tanh => v.tanh(),
        }
    }

    /// Derivative at the pre-activation `pre`; ReLU uses H(0) = 0.
    #[inline]
    pub fn derivative(self, pre: f64) -> f64 {
        match self {
            Activation::Relu => heaviside(pre),
            Activation::Identity => 1.0,
            Activation::Tanh => {
                let t = pre.tanh();
                1.0 - t * t
            }
        }
    }
}

#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("latent dimension {0} outside [{MIN_LATENT}, {MAX_LATENT}]")]
    InvalidLatentDim(usize),
    #[error("expected a vector of length {expected}, got {actual}")]
    InputLength { expected: usize, actual: usize },
    #[error("layer {layer}: expected shape {expected:?}, got {actual:?}")]
    LayerShape {
        layer: usize,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("non-finite parameter in layer {layer}")]
    NonFiniteParameter { layer: usize },
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("training requires a nonempty dataset")]
    EmptyDataset,
    #[error("dataset point {index} is outside [-1, 1]^{INPUT_DIM}")]
    PointOutOfRange { index: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
}

/// `(rows, cols)` of each weight matrix for latent dimension `d`.
pub fn layer_shapes(d: usize) -> [(usize, usize); LAYER_COUNT] {
    let [h1, h2, h3] = HIDDEN;
    [
        (h1, INPUT_DIM),
        (h2, h1),
        (h3, h2),
        (d, h3),
        (h3, d),
        (h2, h3),
        (h1, h2),
        (INPUT_DIM, h1),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            weights: Matrix::zeros(rows, cols),
            biases: vec![0.0; rows],
        }
    }

    fn affine(&self, x: &[f64]) -> Vec<f64> {
        (0..self.weights.rows())
            .map(|i| dot(self.weights.row(i), x) + self.biases[i])
            .collect()
    }

    fn is_finite(&self) -> bool {
        self.weights.as_slice().iter().all(|v| v.is_finite())
            && self.biases.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderParams {
    latent_dim: usize,
    layers: Vec<Layer>,
}

impl AutoencoderParams {
    /// Validates the shape chain and finiteness.
    pub fn from_layers(latent_dim: usize, layers: Vec<Layer>) -> Result<Self, ModelError> {
        check_latent(latent_dim)?;
        if layers.len() != LAYER_COUNT {
            return Err(ModelError::InvalidConfig(format!(
                "expected {LAYER_COUNT} layers, got {}",
                layers.len()
            )));
        }
        for (i, (layer, &shape)) in layers.iter().zip(&layer_shapes(latent_dim)).enumerate() {
            if layer.weights.shape() != shape || layer.biases.len() != shape.0 {
                return Err(ModelError::LayerShape {
                    layer: i,
                    expected: shape,
                    actual: (layer.weights.rows(), layer.weights.cols()),
                });
            }
            if !layer.is_finite() {
                return Err(ModelError::NonFiniteParameter { layer: i });
            }
        }
        Ok(Self { latent_dim, layers })
    }

    pub fn zeros(latent_dim: usize) -> Result<Self, ModelError> {
        check_latent(latent_dim)?;
        Ok(Self {
            latent_dim,
            layers: layer_shapes(latent_dim)
                .iter()
                .map(|&(r, c)| Layer::zeros(r, c))
                .collect(),
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> &Layer {
        &self.layers[i]
    }

    /// Mutable access for in-place updates; shapes cannot change through it.
    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.biases.len())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(Layer::is_finite)
    }

    /// Weight and bias buffers in a fixed order (w₁, b₁, …, w₈, b₈).
    pub fn buffers(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.biases.as_slice()])
    }

    pub fn buffers_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.biases.as_mut_slice()])
    }
}

fn check_latent(d: usize) -> Result<(), ModelError> {
    if (MIN_LATENT..=MAX_LATENT).contains(&d) {
        Ok(())
    } else {
        Err(ModelError::InvalidLatentDim(d))
    }
}

/// Every weight and bias of a layer with fan-in `f` is drawn from
/// U[−1/√f, 1/√f].
pub fn init(latent_dim: usize, seed: u64) -> Result<AutoencoderParams, ModelError> {
    check_latent(latent_dim)?;
    let layers = layer_shapes(latent_dim)
        .iter()
        .enumerate()
        .map(|(i, &(rows, cols))| {
            let mut rng = rng::stream(seed, 0xae00 + i as u64);
            let bound = 1.0 / (cols as f64).sqrt();
            let weights = Matrix::from_fn(rows, cols, |_, _| rng::uniform(&mut rng, -bound, bound));
            let biases = (0..rows)
                .map(|_| rng::uniform(&mut rng, -bound, bound))
                .collect();
            Layer { weights, biases }
        })
        .collect();
    Ok(AutoencoderParams { latent_dim, layers })
}

/// Pre- and post-activations of every layer for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationCache {
    pub input: Vec<f64>,
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
}

impl ActivationCache {
    pub fn latent(&self) -> &[f64] {
        &self.post[LATENT_LAYER]
    }

    pub fn reconstruction(&self) -> &[f64] {
        &self.post[LAYER_COUNT - 1]
    }

    /// Input fed to layer `i`.
    pub fn layer_input(&self, i: usize) -> &[f64] {
        if i == 0 {
            &self.input
        } else {
            &self.post[i - 1]
        }
    }
}

/// Runs layers `first..LAYER_COUNT` on `input`, returning pre- and
/// post-activations.
pub(crate) fn run_layers(
    params: &AutoencoderParams,
    first: usize,
    input: &[f64],
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut pre = Vec::with_capacity(LAYER_COUNT - first);
    let mut post: Vec<Vec<f64>> = Vec::with_capacity(LAYER_COUNT - first);
    for i in first..LAYER_COUNT {
        let x = post.last().map_or(input, |v| v.as_slice());
        let z = params.layers[i].affine(x);
        let a = z.iter().map(|&v| ACTIVATIONS[i].apply(v)).collect();
        pre.push(z);
        post.push(a);
    }
    (pre, post)
}

pub fn forward(params: &AutoencoderParams, x: &[f64]) -> Result<ActivationCache, ModelError> {
    if x.len() != INPUT_DIM {
        return Err(ModelError::InputLength {
            expected: INPUT_DIM,
            actual: x.len(),
        });
    }
    let (pre, post) = run_layers(params, 0, x);
    Ok(ActivationCache {
        input: x.to_vec(),
        pre,
        post,
    })
}

/// `f_dec ∘ f_enc (x)`.
pub fn reconstruct(params: &AutoencoderParams, x: &[f64]) -> Result<Vec<f64>, ModelError> {
    Ok(forward(params, x)?.post.pop().expect("eight layers"))
}

/// Mean squared error `(1/n) Σ (yᵢ − xᵢ)²`.
pub fn loss(y: &[f64], x: &[f64]) -> f64 {
    assert_eq!(y.len(), x.len(), "loss operands differ in length");
    y.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

/// Gradient buffers shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(params: &AutoencoderParams) -> Self {
        Self {
            layers: params
                .layers
                .iter()
                .map(|l| Layer::zeros(l.weights.rows(), l.weights.cols()))
                .collect(),
        }
    }

    pub fn clear(&mut self) {
        for b in self.buffers_mut() {
            b.fill(0.0);
        }
    }

    pub fn buffers(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.biases.as_slice()])
    }

    pub fn buffers_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.biases.as_mut_slice()])
    }

    pub fn is_zero(&self) -> bool {
        self.buffers().all(|b| b.iter().all(|&v| v == 0.0))
    }
}

/// Exact gradient of `loss(y, x)` for the cached input.
pub fn backward(params: &AutoencoderParams, cache: &ActivationCache) -> Gradients {
    let mut grads = Gradients::zeros_like(params);
    backward_accumulate(params, cache, 1.0, &mut grads);
    grads
}

/// Adds `weight` times the per-sample gradient into `grads`.
pub fn backward_accumulate(
    params: &AutoencoderParams,
    cache: &ActivationCache,
    weight: f64,
    grads: &mut Gradients,
) {
    let y = cache.reconstruction();
    let n = y.len() as f64;
    // dL/dpre₈ = (2/n)(y − x) ⊙ (1 − y²)
    let mut delta: Vec<f64> = y
        .iter()
        .zip(&cache.input)
        .map(|(yi, xi)| 2.0 / n * (yi - xi) * (1.0 - yi * yi))
        .collect();

    for i in (0..LAYER_COUNT).rev() {
        let a = cache.layer_input(i);
        let g = &mut grads.layers[i];
        let cols = g.weights.cols();
        let gw = g.weights.as_mut_slice();
        for (r, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let wd = weight * d;
            g.biases[r] += wd;
            for (gv, &av) in gw[r * cols..(r + 1) * cols].iter_mut().zip(a) {
                *gv += wd * av;
            }
        }
        if i == 0 {
            break;
        }
        // propagate through Wᵢᵀ and the previous layer's activation
        let w = &params.layers[i].weights;
        let mut next = vec![0.0; cols];
        for (r, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for (nv, &wv) in next.iter_mut().zip(w.row(r)) {
                *nv += d * wv;
            }
        }
        let act = ACTIVATIONS[i - 1];
        for (nv, &p) in next.iter_mut().zip(&cache.pre[i - 1]) {
            *nv *= act.derivative(p);
        }
        delta = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub const ADAM_DEFAULT: Optimizer = Optimizer::Adam {
        beta1: 0.9,
        beta2: 0.999,
        eps: 1e-8,
    };
}

pub const DEFAULT_CHECKPOINTS: [usize; 6] = [0, 1, 4, 10, 50, 300];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub checkpoint_epochs: BTreeSet<usize>,
    pub seed: u64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            checkpoint_epochs: DEFAULT_CHECKPOINTS.into_iter().collect(),
            seed: 0,
            batch_size: 128,
            learning_rate: 1e-3,
            optimizer: Optimizer::ADAM_DEFAULT,
        }
    }
}

impl TrainingConfig {
    /// Default checkpoints clipped to `[0, epochs]`, with `epochs` added.
    pub fn with_epochs(epochs: usize) -> Self {
        let mut checkpoint_epochs: BTreeSet<usize> = DEFAULT_CHECKPOINTS
            .into_iter()
            .filter(|&e| e <= epochs)
            .collect();
        checkpoint_epochs.insert(epochs);
        Self {
            epochs,
            checkpoint_epochs,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.checkpoint_epochs.contains(&0) {
            return Err(ModelError::InvalidConfig(
                "checkpoint epochs must include 0".into(),
            ));
        }
        if let Some(&e) = self.checkpoint_epochs.iter().find(|&&e| e > self.epochs) {
            return Err(ModelError::InvalidConfig(format!(
                "checkpoint epoch {e} exceeds the {} training epochs",
                self.epochs
            )));
        }
        if self.batch_size == 0 {
            return Err(ModelError::InvalidConfig("batch size must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: i32,
}

fn apply_update(
    params: &mut AutoencoderParams,
    grads: &Gradients,
    config: &TrainingConfig,
    adam: &mut Option<AdamState>,
) {
    let lr = config.learning_rate;
    match (config.optimizer, adam) {
        (Optimizer::Sgd, _) => {
            for (p, g) in params.buffers_mut().zip(grads.buffers()) {
                for (pv, gv) in p.iter_mut().zip(g) {
                    *pv -= lr * gv;
                }
            }
        }
        (Optimizer::Adam { beta1, beta2, eps }, Some(state)) => {
            state.step += 1;
            let c1 = 1.0 - beta1.powi(state.step);
            let c2 = 1.0 - beta2.powi(state.step);
            for (((p, g), m), v) in params
                .buffers_mut()
                .zip(grads.buffers())
                .zip(state.m.iter_mut())
                .zip(state.v.iter_mut())
            {
                for i in 0..p.len() {
                    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                    let m_hat = m[i] / c1;
                    let v_hat = v[i] / c2;
                    p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
        (Optimizer::Adam { .. }, None) => unreachable!("adam state is created with the run"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    /// `(epoch, parameters)` in increasing epoch order.
    pub checkpoints: Vec<(usize, AutoencoderParams)>,
    /// Entry 0 is the mean loss of the initial parameters over the dataset;
    /// entry `e ≥ 1` is the mean per-sample loss seen during epoch `e`.
    pub epoch_losses: Vec<f64>,
}

pub fn mean_loss(params: &AutoencoderParams, points: &[Vec<f64>]) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for x in points {
        total += loss(&reconstruct(params, x)?, x);
    }
    Ok(total / points.len().max(1) as f64)
}

/// Epoch order for the given seed: a Fisher–Yates shuffle keyed by `(seed, epoch)`.
pub fn epoch_order(len: usize, seed: u64, epoch: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = rng::stream(seed, 0x5eed_0000 + epoch as u64);
    order.shuffle(&mut rng);
    order
}

/// Mini-batch training. Single threaded and fully determined by
/// `(params, points, config)`.
pub fn train(
    mut params: AutoencoderParams,
    points: &[Vec<f64>],
    config: &TrainingConfig,
) -> Result<TrainingRun, ModelError> {
    config.validate()?;
    if points.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    for (index, x) in points.iter().enumerate() {
        if x.len() != INPUT_DIM {
            return Err(ModelError::InputLength {
                expected: INPUT_DIM,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(ModelError::PointOutOfRange { index });
        }
    }

    let mut checkpoints = vec![(0, params.clone())];
    let initial = mean_loss(&params, points)?;
    if !initial.is_finite() {
        return Err(ModelError::NonFiniteLoss { epoch: 0, batch: 0 });
    }
    let mut epoch_losses = vec![initial];

    let mut grads = Gradients::zeros_like(&params);
    let mut adam = match config.optimizer {
        Optimizer::Adam { .. } => Some(AdamState {
            m: grads.buffers().map(|b| vec![0.0; b.len()]).collect(),
            v: grads.buffers().map(|b| vec![0.0; b.len()]).collect(),
            step: 0,
        }),
        Optimizer::Sgd => None,
    };

    for epoch in 1..=config.epochs {
        let order = epoch_order(points.len(), config.seed, epoch);
        let mut epoch_total = 0.0;
        for (batch, chunk) in order.chunks(config.batch_size).enumerate() {
            grads.clear();
            let weight = 1.0 / chunk.len() as f64;
            let mut batch_total = 0.0;
            for &idx in chunk {
                let cache = forward(&params, &points[idx])?;
                batch_total += loss(cache.reconstruction(), &cache.input);
                backward_accumulate(&params, &cache, weight, &mut grads);
            }
            if !batch_total.is_finite() {
                return Err(ModelError::NonFiniteLoss { epoch, batch });
            }
            epoch_total += batch_total;
            apply_update(&mut params, &grads, config, &mut adam);
            if !params.is_finite() {
                return Err(ModelError::NonFiniteLoss { epoch, batch });
            }
        }
        epoch_losses.push(epoch_total / points.len() as f64);
        if config.checkpoint_epochs.contains(&epoch) {
            checkpoints.push((epoch, params.clone()));
        }
    }
    Ok(TrainingRun {
        checkpoints,
        epoch_losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(seed: u64) -> Vec<f64> {
        let mut rng = rng::stream(seed, 77);
        (0..INPUT_DIM).map(|_| rng::uniform(&mut rng, -1.0, 1.0)).collect()
    }

    #[test]
    fn init_bounds_and_shapes() {
        let p = init(8, 3).unwrap();
        for (layer, &(r, c)) in p.layers().iter().zip(&layer_shapes(8)) {
            assert_eq!(layer.weights.shape(), (r, c));
            let bound = 1.0 / (c as f64).sqrt();
            assert!(layer.weights.as_slice().iter().all(|v| v.abs() <= bound));
            assert!(layer.biases.iter().all(|v| v.abs() <= bound));
        }
        assert!(p.layer(0).weights.as_slice().iter().all(|v| v.abs() <= 1.0 / 28.0));
        assert_eq!(init(8, 3).unwrap(), p);
        assert!(matches!(init(1, 0), Err(ModelError::InvalidLatentDim(1))));
        assert!(matches!(init(21, 0), Err(ModelError::InvalidLatentDim(21))));
    }

    #[test]
    fn init_layer_one_mean_within_clt_bound() {
        let p = init(8, 0).unwrap();
        let w = p.layer(0).weights.as_slice();
        let n = w.len() as f64;
        let sigma = (1.0 / 28.0) / 3f64.sqrt();
        let mean = w.iter().sum::<f64>() / n;
        assert!(mean.abs() < 3.0 * sigma / n.sqrt(), "{mean}");
    }

    #[test]
    fn zero_network_maps_to_zero() {
        let p = AutoencoderParams::zeros(5).unwrap();
        let c = forward(&p, &point(1)).unwrap();
        assert!(c.latent().iter().all(|&v| v == 0.0));
        assert!(c.reconstruction().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_input_with_zero_biases() {
        let mut p = init(4, 1).unwrap();
        for l in p.layers_mut() {
            l.biases.fill(0.0);
        }
        let c = forward(&p, &vec![0.0; INPUT_DIM]).unwrap();
        assert!(c.reconstruction().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reconstruction_is_inside_the_closed_cube() {
        let mut p = init(4, 2).unwrap();
        for b in p.buffers_mut() {
            for v in b.iter_mut() {
                *v *= 3.0;
            }
        }
        let y = reconstruct(&p, &point(5)).unwrap();
        assert!(y.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn forward_rejects_wrong_length() {
        let p = init(3, 0).unwrap();
        assert!(matches!(
            forward(&p, &[0.0; 10]),
            Err(ModelError::InputLength { expected: 784, actual: 10 })
        ));
    }

    #[test]
    fn loss_hand_cases() {
        let ones = vec![1.0; INPUT_DIM];
        assert_eq!(loss(&ones, &ones), 0.0);
        assert_eq!(loss(&vec![0.0; INPUT_DIM], &ones), 1.0);
        assert_eq!(loss(&vec![-1.0; INPUT_DIM], &ones), 4.0);
    }

    #[test]
    fn gradients_vanish_at_zero_error() {
        // zero network reconstructs 0, which is exactly the zero input
        let p = AutoencoderParams::zeros(3).unwrap();
        let c = forward(&p, &vec![0.0; INPUT_DIM]).unwrap();
        assert!(backward(&p, &c).is_zero());
    }

    #[test]
    fn last_bias_gradient_matches_hand_formula() {
        let p = init(6, 4).unwrap();
        let x = point(9);
        let c = forward(&p, &x).unwrap();
        let g = backward(&p, &c);
        let y = c.reconstruction();
        for i in 0..INPUT_DIM {
            let expected = 2.0 / 784.0 * (y[i] - x[i]) * (1.0 - y[i] * y[i]);
            assert!((g.layers[7].biases[i] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = TrainingConfig::with_epochs(10);
        assert_eq!(c.checkpoint_epochs, [0, 1, 4, 10].into_iter().collect());
        assert!(c.validate().is_ok());
        c.checkpoint_epochs.insert(11);
        assert!(c.validate().is_err());
        let mut c = TrainingConfig::with_epochs(3);
        c.checkpoint_epochs.remove(&0);
        assert!(c.validate().is_err());
        assert_eq!(TrainingConfig::with_epochs(0).checkpoint_epochs.len(), 1);
    }

    #[test]
    fn zero_epochs_returns_initialisation() {
        let p = init(4, 0).unwrap();
        let run = train(p.clone(), &[point(1)], &TrainingConfig::with_epochs(0)).unwrap();
        assert_eq!(run.checkpoints, vec![(0, p)]);
        assert_eq!(run.epoch_losses.len(), 1);
    }

    #[test]
    fn one_sgd_epoch_moves_parameters() {
        let p = init(4, 0).unwrap();
        let config = TrainingConfig {
            optimizer: Optimizer::Sgd,
            learning_rate: 0.1,
            ..TrainingConfig::with_epochs(1)
        };
        let run = train(p.clone(), &[point(2)], &config).unwrap();
        assert_ne!(run.checkpoints[1].1, p);

        // zero network on the zero point has zero gradient everywhere
        let z = AutoencoderParams::zeros(4).unwrap();
        let run = train(z.clone(), &[vec![0.0; INPUT_DIM]], &config).unwrap();
        assert_eq!(run.checkpoints[1].1, z);
    }

    #[test]
    fn training_rejects_bad_data() {
        let p = init(4, 0).unwrap();
        let c = TrainingConfig::with_epochs(1);
        assert_eq!(train(p.clone(), &[], &c), Err(ModelError::EmptyDataset));
        let mut x = point(3);
        x[5] = 1.5;
        assert_eq!(
            train(p, &[x], &c),
            Err(ModelError::PointOutOfRange { index: 0 })
        );
    }

    #[test]
    fn shuffle_is_reproducible() {
        assert_eq!(epoch_order(100, 3, 2), epoch_order(100, 3, 2));
        assert_ne!(epoch_order(100, 3, 2), epoch_order(100, 3, 3));
        let mut o = epoch_order(100, 3, 2);
        o.sort();
        assert_eq!(o, (0..100).collect::<Vec<_>>());
    }
}
