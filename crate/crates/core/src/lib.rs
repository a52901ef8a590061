//! Spectral analysis of autoencoder Jacobians against random-matrix laws.
//!
//! * [`linalg`]: dense matrices and a Hessenberg/Francis QR eigensolver.
//! * [`rmt`]: random-matrix samplers, limiting laws and predicted quantiles.
//! * [`autoencoder`] and [`checkpoint`]: the 784-…-d-…-784 MLP, its training and storage.
//! * [`jacobian`]: chain-rule Jacobians of the encoder, decoder and both compositions.
//! * [`data`]: MNIST IDX parsing and a synthetic dataset.
//! * [`spectra`]: box-plot summaries, empirical spectral CDFs and KS distances.
//! * [`exec`]: order-preserving data-parallel maps (rayon behind the `parallel` feature).

pub mod autoencoder;
pub mod checkpoint;
pub mod data;
pub mod exec;
pub mod jacobian;
pub mod linalg;
pub mod rmt;
pub mod rng;
pub mod spectra;

pub use linalg::{eigenvalues, hessenberg, LinalgError, Matrix, Spectrum};
