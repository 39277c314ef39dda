//! Linear dimension reduction: scree data and truncated reconstruction error.

use ndarray::{s, Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::spectral::{column_means, frobenius, svd_of, DataMatrix, SvdResult};
use crate::svp::{Source, Spectrum};

#[derive(Debug, Clone)]
pub struct PcaModel {
    mean: Array1<f64>,
    svd: SvdResult,
    centered: bool,
}

impl PcaModel {
    /// Column means that were subtracted (zeros when not centered).
    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn svd(&self) -> &SvdResult {
        &self.svd
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.svd.singular_values.clone(), Source::Pca)
            .expect("singular values are sorted and non-negative")
    }

    /// Projects `x` onto the leading `k` right singular vectors and maps back.
    pub fn reconstruct(&self, x: &DataMatrix, k: usize) -> Result<DataMatrix> {
        let r = self.svd.rank_bound();
        if k == 0 || k > r {
            return Err(Error::argument(format!("k must be in 1..={r}, got {k}")));
        }
        if x.col_count() != self.mean.len() {
            return Err(Error::argument(format!(
                "model has {} features, data has {}",
                self.mean.len(),
                x.col_count()
            )));
        }
        let basis = self.svd.vt.slice(s![..k, ..]);
        let shifted: Array2<f64> = x.values() - &self.mean.view().insert_axis(Axis(0));
        let coords = shifted.dot(&basis.t());
        let back = coords.dot(&basis) + self.mean.view().insert_axis(Axis(0));
        DataMatrix::new(back)
    }
}

/// Fits PCA by SVD of `x`, optionally after subtracting column means.
pub fn fit_pca(x: &DataMatrix, center: bool) -> Result<PcaModel> {
    let mean = if center {
        column_means(x)
    } else {
        Array1::zeros(x.col_count())
    };
    let svd = if center {
        let centered = x.values() - &mean.view().insert_axis(Axis(0));
        svd_of(&centered.view())?
    } else {
        svd_of(&x.view())?
    };
    Ok(PcaModel {
        mean,
        svd,
        centered: center,
    })
}

/// Normalized variance per component: σᵢ² / Σσⱼ².
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeData {
    pub normalized_variance: Vec<f64>,
}

pub fn scree(model: &PcaModel) -> Result<ScreeData> {
    let squares: Vec<f64> = model.svd.singular_values.iter().map(|s| s * s).collect();
    let total: f64 = squares.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSpectrum(
            "all singular values are zero; scree is undefined".into(),
        ));
    }
    Ok(ScreeData {
        normalized_variance: squares.into_iter().map(|v| v / total).collect(),
    })
}

/// Relative Frobenius error `‖x − x̂_k‖ / ‖x‖` for each requested `k`.
///
/// When `x` itself is all zeros the absolute error is reported instead.
pub fn reconstruction_error_curve(
    model: &PcaModel,
    x: &DataMatrix,
    ks: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let norm = x.frobenius_norm();
    ks.iter()
        .map(|&k| {
            let approx = model.reconstruct(x, k)?;
            let err = frobenius(&(x.values() - approx.values()).view());
            Ok((k, if norm > 0.0 { err / norm } else { err }))
        })
        .collect()
}
