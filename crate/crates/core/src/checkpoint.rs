//! Binary checkpoint files.
//!
//! Layout (all little endian):
//!
//! ```text
//! "AESPEC01"                       8 bytes
//! latent_dim: u32, epoch: u32, seed: u64
//! 8 × { rows: u32, cols: u32, rows·cols f64 weights (row major), rows f64 biases }
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use crate::autoencoder::{
    layer_shapes, AutoencoderParams, Layer, ModelError, LAYER_COUNT, MAX_LATENT, MIN_LATENT,
};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 8] = b"AESPEC01";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (expected magic {:?}, found {found:?})", String::from_utf8_lossy(MAGIC))]
    BadMagic { found: Vec<u8> },
    #[error("checkpoint truncated: {0}")]
    Truncated(#[source] io::Error),
    #[error("layer {layer} has shape {found:?}, expected {expected:?} for latent dimension {latent_dim}")]
    Shape {
        layer: usize,
        latent_dim: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("{0} unexpected trailing bytes after the last layer")]
    TrailingBytes(usize),
    #[error("invalid parameters: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub epoch: u32,
    pub seed: u64,
    pub params: AutoencoderParams,
}

impl Checkpoint {
    pub fn latent_dim(&self) -> usize {
        self.params.latent_dim()
    }

    pub fn file_name(latent_dim: usize, epoch: usize) -> String {
        format!("ae_d{latent_dim}_e{epoch}.ckpt")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 8 * (self.params.parameter_count() + 2 * LAYER_COUNT));
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(self.params.latent_dim() as u32)?;
        w.write_u32::<LittleEndian>(self.epoch)?;
        w.write_u64::<LittleEndian>(self.seed)?;
        for layer in self.params.layers() {
            w.write_u32::<LittleEndian>(layer.weights.rows() as u32)?;
            w.write_u32::<LittleEndian>(layer.weights.cols() as u32)?;
            for &v in layer.weights.as_slice() {
                w.write_f64::<LittleEndian>(v)?;
            }
            for &v in &layer.biases {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = bytes;
        let ckpt = Self::read_from(&mut r)?;
        if !r.is_empty() {
            return Err(CheckpointError::TrailingBytes(r.len()));
        }
        Ok(ckpt)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, CheckpointError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(CheckpointError::Truncated)?;
        if &magic != MAGIC {
            return Err(CheckpointError::BadMagic {
                found: magic.to_vec(),
            });
        }
        let t = CheckpointError::Truncated;
        let latent_dim = r.read_u32::<LittleEndian>().map_err(t)? as usize;
        let epoch = r.read_u32::<LittleEndian>().map_err(t)?;
        let seed = r.read_u64::<LittleEndian>().map_err(t)?;
        if !(MIN_LATENT..=MAX_LATENT).contains(&latent_dim) {
            return Err(ModelError::InvalidLatentDim(latent_dim).into());
        }
        let shapes = layer_shapes(latent_dim);
        let mut layers = Vec::with_capacity(LAYER_COUNT);
        for (i, &expected) in shapes.iter().enumerate() {
            let rows = r.read_u32::<LittleEndian>().map_err(t)? as usize;
            let cols = r.read_u32::<LittleEndian>().map_err(t)? as usize;
            if (rows, cols) != expected {
                return Err(CheckpointError::Shape {
                    layer: i,
                    latent_dim,
                    expected,
                    found: (rows, cols),
                });
            }
            let mut weights = vec![0.0; rows * cols];
            r.read_f64_into::<LittleEndian>(&mut weights).map_err(t)?;
            let mut biases = vec![0.0; rows];
            r.read_f64_into::<LittleEndian>(&mut biases).map_err(t)?;
            let weights = Matrix::from_vec(rows, cols, weights)
                .map_err(|_| ModelError::NonFiniteParameter { layer: i })?;
            layers.push(Layer { weights, biases });
        }
        let params = AutoencoderParams::from_layers(latent_dim, layers)?;
        Ok(Self {
            epoch,
            seed,
            params,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        Self::from_bytes(&fs::read(path)?)
    }
}
