use std::path::Path;

use ndarray::Array2;
use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::idx::{decode_idx_images, decode_idx_labels, read_maybe_gz, IdxImages};
use crate::error::{Error, Result};
use crate::spectral::DataMatrix;

pub const MNIST_PIXELS: usize = 28 * 28;

/// Images scaled to [0, 1] with their digit labels.
#[derive(Debug, Clone)]
pub struct MnistSet {
    images: DataMatrix,
    labels: Vec<u8>,
}

impl MnistSet {
    pub fn new(images: DataMatrix, labels: Vec<u8>) -> Result<Self> {
        if images.row_count() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} images but {} labels",
                images.row_count(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 9) {
            return Err(Error::InvalidInput(format!("label {bad} is not a digit")));
        }
        if images.values().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidInput("pixel values must lie in [0, 1]".into()));
        }
        Ok(MnistSet { images, labels })
    }

    /// Builds a set from decoded IDX payloads, dividing pixels by 255.
    pub fn from_idx(images: &IdxImages, labels: &[u8]) -> Result<Self> {
        if images.count != labels.len() {
            return Err(Error::format(4, format!(
                "image count {} does not match label count {}",
                images.count,
                labels.len()
            )));
        }
        if images.count == 0 {
            return Err(Error::format(4, "IDX file holds no images"));
        }
        let width = images.rows * images.cols;
        if width == 0 {
            return Err(Error::format(8, "images have zero pixels"));
        }
        if let Some(pos) = labels.iter().position(|&l| l > 9) {
            return Err(Error::format(8 + pos, format!("label {} is not a digit", labels[pos])));
        }
        let pixels = Array2::from_shape_fn((images.count, width), |(i, j)| {
            f64::from(images.pixels[i * width + j]) / 255.0
        });
        MnistSet::new(DataMatrix::new(pixels)?, labels.to_vec())
    }

    pub fn images(&self) -> &DataMatrix {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Row indices carrying `digit`, in file order.
    pub fn indices_of(&self, digit: u8) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == digit).collect()
    }

    /// Seeded uniform sample without replacement of `count` images of `digit`.
    pub fn digit_subset(&self, digit: u8, count: usize, seed: u64) -> Result<DataMatrix> {
        if digit > 9 {
            return Err(Error::argument(format!("digit must be 0..=9, got {digit}")));
        }
        let pool = self.indices_of(digit);
        if count == 0 || count > pool.len() {
            return Err(Error::argument(format!(
                "requested {count} images of digit {digit}, {} available",
                pool.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked: Vec<usize> = sample(&mut rng, pool.len(), count).into_iter().map(|i| pool[i]).collect();
        self.images.select_rows(&picked)
    }
}

/// Loads IDX image and label files, either of which may be gzipped.
pub fn load_mnist_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<MnistSet> {
    let images = decode_idx_images(&read_maybe_gz(images_path)?)?;
    let labels = decode_idx_labels(&read_maybe_gz(labels_path)?)?;
    MnistSet::from_idx(&images, &labels)
}
