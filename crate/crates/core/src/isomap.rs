//! Isomap: geodesic distances on a k-nearest-neighbor graph followed by
//! classical scaling of the double-centered squared distances.
//!
//! The reported spectrum is the singular values of the embedding
//! `Σ^{1/2} Vᵀ`, i.e. `sqrt(max(λ, 0))` for the eigenvalues `λ` of the Gram
//! matrix, which puts it on the same footing as the PCA spectrum (singular
//! values of a point cloud). The raw Gram eigenvalues are kept alongside.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::spectral::{symmetric_eigen, DataMatrix};
use crate::svp::{Source, Spectrum};

pub const DEFAULT_NEIGHBORS: usize = 10;

/// Symmetric neighbor distances; `f64::INFINITY` marks a missing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    distances: Array2<f64>,
}

impl NeighborGraph {
    pub fn distances(&self) -> &Array2<f64> {
        &self.distances
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.distances[[i, j]].is_finite()
    }

    pub fn len(&self) -> usize {
        self.distances.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All-pairs shortest path lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicMatrix {
    distances: Array2<f64>,
}

impl GeodesicMatrix {
    /// Accepts any finite, symmetric, zero-diagonal, non-negative matrix.
    pub fn from_distances(distances: Array2<f64>) -> Result<Self> {
        let n = distances.nrows();
        if n == 0 || distances.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "distance matrix must be square and non-empty, got {:?}",
                distances.dim()
            )));
        }
        for i in 0..n {
            if distances[[i, i]] != 0.0 {
                return Err(Error::InvalidInput(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let d = distances[[i, j]];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInput(format!("invalid distance {d} at ({i}, {j})")));
                }
                if d != distances[[j, i]] {
                    return Err(Error::InvalidInput(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(GeodesicMatrix { distances })
    }

    pub fn distances(&self) -> &Array2<f64> {
        &self.distances
    }
}

pub(crate) fn pairwise_distances(x: &DataMatrix) -> Array2<f64> {
    let v = x.values();
    let m = x.row_count();
    let mut d = Array2::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            let dist = v
                .row(i)
                .iter()
                .zip(v.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[[i, j]] = dist;
            d[[j, i]] = dist;
        }
    }
    d
}

/// Connects every sample to its `k` nearest neighbors (ties go to the lower
/// index) and symmetrizes by union.
pub fn knn_graph(x: &DataMatrix, k: usize) -> Result<NeighborGraph> {
    let m = x.row_count();
    if k == 0 || k >= m {
        return Err(Error::argument(format!(
            "neighbor count must be in 1..{m} for {m} samples, got {k}"
        )));
    }
    let all = pairwise_distances(x);
    let mut distances = Array2::from_elem((m, m), f64::INFINITY);
    let mut candidates: Vec<usize> = Vec::with_capacity(m - 1);
    for i in 0..m {
        distances[[i, i]] = 0.0;
        candidates.clear();
        candidates.extend((0..m).filter(|&j| j != i));
        candidates.sort_by(|&a, &b| all[[i, a]].total_cmp(&all[[i, b]]).then(a.cmp(&b)));
        for &j in &candidates[..k] {
            distances[[i, j]] = all[[i, j]];
            distances[[j, i]] = all[[i, j]];
        }
    }
    Ok(NeighborGraph { distances })
}

/// Floyd–Warshall shortest paths.
pub fn geodesics(g: &NeighborGraph) -> Result<GeodesicMatrix> {
    let n = g.len();
    let mut d: Vec<f64> = g.distances.iter().copied().collect();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    if let Some(pos) = d.iter().position(|v| v.is_infinite()) {
        return Err(Error::DisconnectedGraph {
            from: pos / n,
            to: pos % n,
        });
    }
    let distances = Array2::from_shape_vec((n, n), d).expect("n*n entries");
    Ok(GeodesicMatrix { distances })
}

/// Gram matrix `S = −½ (D² − row means − column means + grand mean)`.
pub fn double_center(d: &GeodesicMatrix) -> Result<DataMatrix> {
    let sq = d.distances.mapv(|v| v * v);
    let n = sq.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = sq.rows().into_iter().map(|r| r.sum() / nf).collect();
    let col_means: Vec<f64> = sq.columns().into_iter().map(|c| c.sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let s = Array2::from_shape_fn((n, n), |(i, j)| {
        -0.5 * (sq[[i, j]] - row_means[i] - col_means[j] + grand)
    });
    // Symmetrize away rounding differences between row and column means.
    let s = (&s + &s.t()) * 0.5;
    DataMatrix::new(s)
}

#[derive(Debug, Clone)]
pub struct IsomapResult {
    /// Samples × `dims` coordinates.
    pub embedding: DataMatrix,
    /// Singular values of the full embedding, descending.
    pub spectrum: Spectrum,
    /// Eigenvalues of the Gram matrix, descending (may be negative).
    pub gram_eigenvalues: Vec<f64>,
}

/// Runs the full pipeline: neighbors, geodesics, double centering,
/// eigendecomposition, embedding. Negative eigenvalues are clamped to zero.
pub fn isomap_embed(x: &DataMatrix, k_neighbors: usize, dims: usize) -> Result<IsomapResult> {
    let m = x.row_count();
    if dims == 0 || dims > m {
        return Err(Error::argument(format!(
            "embedding dimension must be in 1..={m}, got {dims}"
        )));
    }
    let graph = knn_graph(x, k_neighbors)?;
    let geo = geodesics(&graph)?;
    let gram = double_center(&geo)?;
    let (eigenvalues, vectors) = symmetric_eigen(gram.values())?;
    let roots: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let embedding = Array2::from_shape_fn((m, dims), |(i, c)| roots[c] * vectors[[i, c]]);
    Ok(IsomapResult {
        embedding: DataMatrix::new(embedding)?,
        spectrum: Spectrum::new(roots, Source::Isomap)?,
        gram_eigenvalues: eigenvalues,
    })
}
