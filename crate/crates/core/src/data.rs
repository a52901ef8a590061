//! MNIST IDX ingestion and a synthetic stand-in dataset.
//!
//! Images are flattened row major (pixel `(r, c)` lands at index `28r + c`)
//! and mapped to [−1, 1] by `p / 127.5 − 1`.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use thiserror::Error;

use crate::autoencoder::INPUT_DIM;
use crate::rng::{self, Gaussian};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const IMAGE_SIDE: usize = 28;
const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("bad IDX magic 0x{found:08x}, expected 0x{expected:08x}")]
    Magic { expected: u32, found: u32 },
    #[error("IDX header truncated: {0} bytes")]
    Header(usize),
    #[error("IDX payload length mismatch: expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("images are {rows}x{cols}, expected 28x28")]
    ImageSize { rows: usize, cols: usize },
    #[error("{images} images but {labels} labels")]
    LabelCount { images: usize, labels: usize },
    #[error("MNIST files not found in {dir}; expected {expected}")]
    Missing { dir: PathBuf, expected: String },
    #[error("dataset point {index} has a coordinate outside [-1, 1]")]
    OutOfRange { index: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Raw unsigned-byte image tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

/// Inflates gzip input (sniffed by its two magic bytes); passes raw input through.
pub fn maybe_gunzip(bytes: &[u8]) -> Result<Vec<u8>, std::io::Error> {
    if bytes.starts_with(&GZIP_MAGIC) {
        let mut out = Vec::new();
        GzDecoder::new(bytes).read_to_end(&mut out)?;
        Ok(out)
    } else {
        Ok(bytes.to_vec())
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages, DataError> {
    if bytes.len() < 16 {
        return Err(DataError::Header(bytes.len()));
    }
    let magic = be_u32(bytes, 0);
    if magic != IMAGE_MAGIC {
        return Err(DataError::Magic {
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4) as usize;
    let rows = be_u32(bytes, 8) as usize;
    let cols = be_u32(bytes, 12) as usize;
    let expected = count * rows * cols;
    let payload = &bytes[16..];
    if payload.len() != expected {
        return Err(DataError::Length {
            expected,
            actual: payload.len(),
        });
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: payload.to_vec(),
    })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, DataError> {
    if bytes.len() < 8 {
        return Err(DataError::Header(bytes.len()));
    }
    let magic = be_u32(bytes, 0);
    if magic != LABEL_MAGIC {
        return Err(DataError::Magic {
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4) as usize;
    let payload = &bytes[8..];
    if payload.len() != count {
        return Err(DataError::Length {
            expected: count,
            actual: payload.len(),
        });
    }
    Ok(payload.to_vec())
}

#[inline]
pub fn normalize(pixel: u8) -> f64 {
    pixel as f64 / 127.5 - 1.0
}

/// Inverse of [`normalize`], rounded to the nearest byte.
#[inline]
pub fn denormalize(value: f64) -> u8 {
    ((value + 1.0) * 127.5).round().clamp(0.0, 255.0) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn stem(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "t10k",
        }
    }

    pub fn image_file(self) -> String {
        format!("{}-images-idx3-ubyte", self.stem())
    }

    pub fn label_file(self) -> String {
        format!("{}-labels-idx1-ubyte", self.stem())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    MnistTrain,
    MnistTest,
    Synthetic(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Option<Vec<u8>>,
    pub source: Source,
}

impl Dataset {
    /// Checks the [−1, 1] range and label alignment.
    pub fn new(
        points: Vec<Vec<f64>>,
        labels: Option<Vec<u8>>,
        source: Source,
    ) -> Result<Self, DataError> {
        for (index, p) in points.iter().enumerate() {
            if p.len() != INPUT_DIM {
                return Err(DataError::Invalid(format!(
                    "point {index} has length {}, expected {INPUT_DIM}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !(-1.0..=1.0).contains(v)) {
                return Err(DataError::OutOfRange { index });
            }
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(DataError::LabelCount {
                    images: points.len(),
                    labels: l.len(),
                });
            }
        }
        Ok(Self {
            points,
            labels,
            source,
        })
    }

    pub fn from_idx(
        images: &IdxImages,
        labels: Option<Vec<u8>>,
        source: Source,
    ) -> Result<Self, DataError> {
        if images.rows != IMAGE_SIDE || images.cols != IMAGE_SIDE {
            return Err(DataError::ImageSize {
                rows: images.rows,
                cols: images.cols,
            });
        }
        let points = (0..images.count)
            .map(|i| images.image(i).iter().map(|&p| normalize(p)).collect())
            .collect();
        Self::new(points, labels, source)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First `count` points (all of them if fewer).
    pub fn truncated(mut self, count: usize) -> Self {
        self.points.truncate(count);
        if let Some(l) = &mut self.labels {
            l.truncate(count);
        }
        self
    }

    /// Seeded subsample of `count` distinct indices, sorted ascending.
    pub fn sample_indices(&self, count: usize, seed: u64) -> Vec<usize> {
        use rand::seq::index;
        let count = count.min(self.len());
        let mut idx = index::sample(&mut rng::stream(seed, 0xda7a), self.len(), count).into_vec();
        idx.sort_unstable();
        idx
    }
}

fn read_maybe_gz(dir: &Path, base: &str) -> Result<Option<Vec<u8>>, DataError> {
    for name in [base.to_string(), format!("{base}.gz")] {
        let path = dir.join(&name);
        if path.is_file() {
            let raw = fs::read(&path).map_err(|source| DataError::Io {
                path: path.clone(),
                source,
            })?;
            return maybe_gunzip(&raw)
                .map(Some)
                .map_err(|source| DataError::Io { path, source });
        }
    }
    Ok(None)
}

/// Loads an MNIST split from `dir`, accepting raw or gzipped IDX files.
/// Labels are optional; images are required.
pub fn load_mnist(dir: &Path, split: Split) -> Result<Dataset, DataError> {
    let image_file = split.image_file();
    let Some(image_bytes) = read_maybe_gz(dir, &image_file)? else {
        return Err(DataError::Missing {
            dir: dir.to_path_buf(),
            expected: format!(
                "{image_file}[.gz] (and optionally {}[.gz])",
                split.label_file()
            ),
        });
    };
    let images = parse_idx_images(&image_bytes)?;
    let labels = read_maybe_gz(dir, &split.label_file())?
        .map(|b| parse_idx_labels(&b))
        .transpose()?;
    let source = match split {
        Split::Train => Source::MnistTrain,
        Split::Test => Source::MnistTest,
    };
    Dataset::from_idx(&images, labels, source)
}

/// Dimension of the affine subspace behind [`synthetic_dataset`].
pub const SYNTHETIC_RANK: usize = 10;
pub const SYNTHETIC_NOISE: f64 = 0.05;

/// Points on a random 10-dimensional affine subspace of [−1, 1]^784 with
/// Gaussian noise (σ = 0.05), clipped to the cube.
pub fn synthetic_dataset(count: usize, seed: u64) -> Result<Dataset, DataError> {
    if count == 0 {
        return Err(DataError::Invalid("synthetic dataset needs at least one point".into()));
    }
    let mut rng = rng::stream(seed, 0x5e7);
    let mut g = Gaussian::new();
    let center: Vec<f64> = (0..INPUT_DIM)
        .map(|_| rng::uniform(&mut rng, -0.25, 0.25))
        .collect();
    let basis: Vec<Vec<f64>> = (0..SYNTHETIC_RANK)
        .map(|_| (0..INPUT_DIM).map(|_| 0.12 * g.sample(&mut rng)).collect())
        .collect();
    let points = (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = (0..SYNTHETIC_RANK).map(|_| g.sample(&mut rng)).collect();
            (0..INPUT_DIM)
                .map(|j| {
                    let signal: f64 = coeffs.iter().zip(&basis).map(|(c, b)| c * b[j]).sum();
                    (center[j] + signal + SYNTHETIC_NOISE * g.sample(&mut rng)).clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();
    Dataset::new(points, None, Source::Synthetic(seed))
}

/// Serialises raw images as an IDX image file (uncompressed).
pub fn encode_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [
        IMAGE_MAGIC,
        images.count as u32,
        images.rows as u32,
        images.cols as u32,
    ] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(count: usize) -> IdxImages {
        IdxImages {
            count,
            rows: 28,
            cols: 28,
            pixels: (0..count * 784).map(|i| (i * 7 % 256) as u8).collect(),
        }
    }

    #[test]
    fn parses_a_hand_built_zero_image() {
        let img = IdxImages {
            count: 1,
            rows: 28,
            cols: 28,
            pixels: vec![0; 784],
        };
        let parsed = parse_idx_images(&encode_idx_images(&img)).unwrap();
        assert_eq!(parsed, img);
        let ds = Dataset::from_idx(&parsed, None, Source::MnistTrain).unwrap();
        assert_eq!(ds.points[0], vec![-1.0; 784]);
    }

    #[test]
    fn rejects_label_magic_and_truncation() {
        let mut bytes = encode_idx_images(&fixture(2));
        bytes[3] = 0x01;
        assert!(matches!(
            parse_idx_images(&bytes),
            Err(DataError::Magic { found: 0x801, .. })
        ));
        let bytes = encode_idx_images(&fixture(2));
        assert!(matches!(
            parse_idx_images(&bytes[..bytes.len() - 5]),
            Err(DataError::Length { expected: 1568, actual: 1563 })
        ));
        assert!(matches!(parse_idx_images(&bytes[..9]), Err(DataError::Header(9))));
    }

    #[test]
    fn labels_parse_and_validate() {
        let mut b = LABEL_MAGIC.to_be_bytes().to_vec();
        b.extend_from_slice(&3u32.to_be_bytes());
        b.extend_from_slice(&[7, 1, 0]);
        assert_eq!(parse_idx_labels(&b).unwrap(), vec![7, 1, 0]);
        assert!(parse_idx_labels(&b[..10]).is_err());
        assert!(parse_idx_images(&b).is_err());
    }

    #[test]
    fn normalisation_endpoints() {
        assert_eq!(normalize(0), -1.0);
        assert!((normalize(255) - 1.0).abs() < 1e-12);
        assert!((normalize(128) - 0.003_921_568_627_450_98).abs() < 1e-12);
        for p in 0..=255u8 {
            assert_eq!(denormalize(normalize(p)), p);
        }
    }

    #[test]
    fn flattening_is_row_major() {
        let img = fixture(1);
        let ds = Dataset::from_idx(&img, None, Source::MnistTrain).unwrap();
        for r in 0..28 {
            for c in 0..28 {
                assert_eq!(denormalize(ds.points[0][28 * r + c]), img.pixels[28 * r + c]);
            }
        }
    }

    #[test]
    fn gzip_is_sniffed() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let raw = encode_idx_images(&fixture(3));
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::fast());
        enc.write_all(&raw).unwrap();
        let gz = enc.finish().unwrap();
        assert_eq!(maybe_gunzip(&gz).unwrap(), raw);
        assert_eq!(maybe_gunzip(&raw).unwrap(), raw);
    }

    #[test]
    fn dataset_invariants() {
        assert!(matches!(
            Dataset::new(vec![vec![1.5; 784]], None, Source::MnistTrain),
            Err(DataError::OutOfRange { index: 0 })
        ));
        assert!(matches!(
            Dataset::new(vec![vec![0.0; 784]], Some(vec![1, 2]), Source::MnistTrain),
            Err(DataError::LabelCount { .. })
        ));
    }

    #[test]
    fn synthetic_is_bounded_and_deterministic() {
        let a = synthetic_dataset(50, 4).unwrap();
        let b = synthetic_dataset(50, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().flatten().all(|v| (-1.0..=1.0).contains(v)));
        assert_ne!(a, synthetic_dataset(50, 5).unwrap());
    }

    #[test]
    fn subsample_is_seeded_and_distinct() {
        let ds = synthetic_dataset(40, 0).unwrap();
        let a = ds.sample_indices(10, 3);
        assert_eq!(a, ds.sample_indices(10, 3));
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ds.sample_indices(100, 3).len(), 40);
    }

    #[test]
    fn missing_directory_names_expected_files() {
        let err = load_mnist(Path::new("/nonexistent/mnist"), Split::Train).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("train-images-idx3-ubyte"), "{msg}");
    }
}
