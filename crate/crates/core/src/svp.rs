//! Singular value proxies.
//!
//! An autoencoder's hidden units carry no ordering and no scale, so the raw
//! code of a batch is turned into a descending spectrum by taking absolute
//! values, sorting every row on its own (largest first) and averaging the
//! sorted rows column by column.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::autoencoder::HiddenBatch;
use crate::error::{Error, Result};

/// Which estimator produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Pca,
    Isomap,
    Autoencoder,
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Source::Pca => "pca",
            Source::Isomap => "isomap",
            Source::Autoencoder => "autoencoder",
        })
    }
}

/// Non-negative values sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    source: Source,
}

impl Spectrum {
    /// Wraps values that are already descending and non-negative.
    pub fn new(values: Vec<f64>, source: Source) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "spectrum entries must be finite and non-negative, found {v}"
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "spectrum is not descending at index {i}: {} < {}",
                values[i],
                values[i + 1]
            )));
        }
        Ok(Spectrum { values, source })
    }

    /// Sorts `values` in descending order first.
    pub fn from_unsorted(mut values: Vec<f64>, source: Source) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values, source)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Singular value proxies of a hidden-layer batch.
pub fn to_svp(hidden: &HiddenBatch) -> Result<Spectrum> {
    svp_of(&hidden.values().view())
}

/// [`to_svp`] on a bare matrix (samples × hidden units).
pub fn svp_of(z: &ArrayView2<f64>) -> Result<Spectrum> {
    let (rows, width) = z.dim();
    if rows == 0 || width == 0 {
        return Err(Error::argument(format!(
            "singular value proxies need a non-empty batch, got {rows}x{width}"
        )));
    }
    let mut sums = vec![0.0; width];
    let mut sorted = vec![0.0; width];
    for row in z.rows() {
        for (dst, v) in sorted.iter_mut().zip(row) {
            *dst = v.abs();
        }
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (s, v) in sums.iter_mut().zip(&sorted) {
            *s += v;
        }
    }
    let n = rows as f64;
    Spectrum::new(sums.into_iter().map(|s| s / n).collect(), Source::Autoencoder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn worked_example() {
        let s = svp_of(&array![[1.0, -2.0], [3.0, -1.0]].view()).unwrap();
        assert_eq!(s.values(), &[2.5, 1.0]);
        assert_eq!(s.source(), Source::Autoencoder);
    }

    #[test]
    fn single_row_is_sorted_magnitudes() {
        let s = svp_of(&array![[-5.0, 2.0, 0.0]].view()).unwrap();
        assert_eq!(s.values(), &[5.0, 2.0, 0.0]);
    }

    #[test]
    fn zero_batch_gives_zero_spectrum() {
        let s = svp_of(&Array2::<f64>::zeros((4, 3)).view()).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_batch_is_an_argument_error() {
        let z = Array2::<f64>::zeros((0, 3));
        assert!(matches!(svp_of(&z.view()), Err(Error::Argument(_))));
    }

    #[test]
    fn spectrum_rejects_unsorted_and_negative() {
        assert!(Spectrum::new(vec![1.0, 2.0], Source::Pca).is_err());
        assert!(Spectrum::new(vec![1.0, -0.5], Source::Pca).is_err());
        assert_eq!(
            Spectrum::from_unsorted(vec![1.0, 3.0, 2.0], Source::Pca).unwrap().values(),
            &[3.0, 2.0, 1.0]
        );
    }
}
