//! Dense linear-algebra kernels shared by every estimator.
//!
//! The SVD is a one-sided (Hestenes) Jacobi iteration run on whichever
//! orientation of the input has fewer columns. It is slower than
//! Golub–Kahan for large square inputs but accurate to working precision
//! on the small-to-medium matrices this crate deals with (tens of samples
//! by hundreds of features).

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Dense real matrix, one sample per row. All entries are finite and both
/// dimensions are at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(Array2<f64>);

impl DataMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "data matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {v} at ({i}, {j})"
            )));
        }
        Ok(DataMatrix(values))
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut flat = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            flat.extend_from_slice(r);
        }
        let values = Array2::from_shape_vec((rows.len(), cols), flat)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(values)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    pub fn row_count(&self) -> usize {
        self.0.nrows()
    }

    pub fn col_count(&self) -> usize {
        self.0.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.0.view())
    }

    /// Rows at the given indices, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.row_count()) {
            return Err(Error::argument(format!(
                "row index {bad} out of range for {} rows",
                self.row_count()
            )));
        }
        Self::new(self.0.select(Axis(0), indices))
    }
}

/// Thin SVD `x = u · diag(singular_values) · vt` with `r = min(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// m × r, orthonormal columns.
    pub u: Array2<f64>,
    /// Length r, descending, non-negative.
    pub singular_values: Vec<f64>,
    /// r × n, orthonormal rows.
    pub vt: Array2<f64>,
}

impl SvdResult {
    pub fn rank_bound(&self) -> usize {
        self.singular_values.len()
    }

    /// Reassembles `u · diag(σ) · vt` using the leading `k` triplets.
    fn assemble(&self, k: usize) -> Array2<f64> {
        let mut scaled = self.u.slice(ndarray::s![.., ..k]).to_owned();
        for (mut col, &s) in scaled.axis_iter_mut(Axis(1)).zip(&self.singular_values) {
            col *= s;
        }
        scaled.dot(&self.vt.slice(ndarray::s![..k, ..]))
    }
}

pub(crate) fn frobenius(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = c * xv - s * yv;
        *y = s * xv + c * yv;
    }
}

/// Splits `cols` so that both `cols[p]` and `cols[q]` can be borrowed mutably.
fn pair_mut(cols: &mut [Vec<f64>], p: usize, q: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(p < q);
    let (head, tail) = cols.split_at_mut(q);
    (&mut head[p], &mut tail[0])
}

type Columns = Vec<Vec<f64>>;

/// One-sided Jacobi on a matrix with `rows >= cols`. Returns the rotated
/// columns (`U Σ`, unsorted) and the accumulated right rotations `V`.
fn hestenes(a: &ArrayView2<f64>) -> Result<(Columns, Columns)> {
    let (m, n) = a.dim();
    debug_assert!(m >= n);
    let mut cols: Vec<Vec<f64>> = a.axis_iter(Axis(1)).map(|c| c.to_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = f64::EPSILON * (m as f64).max(1.0);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (cp, cq) = pair_mut(&mut cols, p, q);
                rotate(cp, cq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            return Ok((cols, v));
        }
    }
    Err(Error::NoConvergence {
        routine: "one-sided Jacobi SVD",
        iterations: MAX_SWEEPS,
    })
}

/// Gram–Schmidt `w` against `basis` twice; returns the residual norm.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let proj = dot(w, b);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
    dot(w, w).sqrt()
}

/// Turns the Jacobi output into sorted, orthonormal factors. Columns whose
/// singular value is negligible are replaced by a unit vector from the
/// orthogonal complement of the columns already accepted.
fn finish_tall(cols: Vec<Vec<f64>>, v: Vec<Vec<f64>>, m: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let sigma: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    let sigma_max = order.first().map_or(0.0, |&i| sigma[i]);
    let negligible = sigma_max * 1e-15;

    let mut u: Vec<Vec<f64>> = Vec::with_capacity(order.len());
    let mut values = Vec::with_capacity(order.len());
    let mut right = Vec::with_capacity(order.len());
    for &j in &order {
        let s = sigma[j];
        let mut accepted = None;
        if s > negligible && s > 0.0 {
            let mut w: Vec<f64> = cols[j].iter().map(|x| x / s).collect();
            let norm = orthogonalize(&mut w, &u);
            if norm > 0.5 {
                w.iter_mut().for_each(|x| *x /= norm);
                accepted = Some(w);
            }
        }
        let w = accepted.unwrap_or_else(|| complement_vector(&u, m));
        u.push(w);
        values.push(s);
        right.push(v[j].clone());
    }
    (u, values, right)
}

fn complement_vector(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let norm = orthogonalize(&mut e, basis);
        if norm > 0.5 {
            e.iter_mut().for_each(|x| *x /= norm);
            return e;
        }
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, e));
        }
    }
    // Some basis vector always keeps a residual of at least 1/sqrt(m).
    let (norm, mut e) = best.expect("m >= 1");
    e.iter_mut().for_each(|x| *x /= norm);
    e
}

fn columns_to_array(cols: &[Vec<f64>], rows: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols.len()), |(i, j)| cols[j][i])
}

/// Flips each singular pair so that the largest-magnitude entry of the left
/// vector is positive.
fn fix_signs(u: &mut Array2<f64>, vt: &mut Array2<f64>) {
    for j in 0..u.ncols() {
        let col = u.column(j);
        let mut pivot = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            u.column_mut(j).mapv_inplace(|x| -x);
            vt.row_mut(j).mapv_inplace(|x| -x);
        }
    }
}

/// Thin singular value decomposition.
pub fn svd(x: &DataMatrix) -> Result<SvdResult> {
    svd_of(&x.view())
}

pub(crate) fn svd_of(a: &ArrayView2<f64>) -> Result<SvdResult> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("cannot decompose an empty matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let (mut u, singular_values, mut vt) = if m >= n {
        let (cols, v) = hestenes(a)?;
        let (left, values, right) = finish_tall(cols, v, m);
        let u = columns_to_array(&left, m);
        let vt = columns_to_array(&right, n).reversed_axes();
        (u, values, vt)
    } else {
        // a^T = U' Σ V'^T, so a = V' Σ U'^T.
        let at = a.t();
        let (cols, v) = hestenes(&at)?;
        let (left, values, right) = finish_tall(cols, v, n);
        let u = columns_to_array(&right, m);
        let vt = columns_to_array(&left, n).reversed_axes();
        (u, values, vt)
    };
    fix_signs(&mut u, &mut vt);
    Ok(SvdResult {
        u,
        singular_values,
        vt,
    })
}

/// Rank-k reconstruction keeping the `k` largest singular values.
pub fn truncated_reconstruct(s: &SvdResult, k: usize) -> Result<DataMatrix> {
    let r = s.rank_bound();
    if k == 0 || k > r {
        return Err(Error::argument(format!("k must be in 1..={r}, got {k}")));
    }
    DataMatrix::new(s.assemble(k))
}

pub fn column_means(x: &DataMatrix) -> Array1<f64> {
    x.values()
        .mean_axis(Axis(0))
        .expect("data matrix has at least one row")
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues are returned in descending (signed) order; eigenvector `k` is
/// column `k` of the returned matrix, with its largest-magnitude entry made
/// positive.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "expected a non-empty square matrix, got {:?}",
            a.dim()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (a[[i, j]], a[[j, i]]);
            if (x - y).abs() > 1e-9 * (1.0 + x.abs().max(y.abs())) {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale = frobenius(&a.view());
    let mut converged = n == 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                m[[p, p]] -= t * apq;
                m[[q, q]] += t * apq;
                m[[p, q]] = 0.0;
                m[[q, p]] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let (arp, arq) = (m[[r, p]], m[[r, q]]);
                        let np = c * arp - s * arq;
                        let nq = s * arp + c * arq;
                        m[[r, p]] = np;
                        m[[p, r]] = np;
                        m[[r, q]] = nq;
                        m[[q, r]] = nq;
                    }
                    let (vrp, vrq) = (v[[r, p]], v[[r, q]]);
                    v[[r, p]] = c * vrp - s * vrq;
                    v[[r, q]] = s * vrp + c * vrq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "symmetric Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[[y, y]].total_cmp(&m[[x, x]]).then(x.cmp(&y)));
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = v.select(Axis(1), &order);
    for mut col in vectors.axis_iter_mut(Axis(1)) {
        let mut pivot = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok((values, vectors))
}
