//! Uncorrelated linear discriminant analysis.
//!
//! Two SVD stages: the centered data matrix is factored to whiten the total
//! scatter, then the whitened between-class scatter is diagonalized. The
//! resulting directions make the projected training features mutually
//! uncorrelated with unit variance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::class_counts;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Fitted ULDA transform: `z = (x - mean) · matrix`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawProjection", try_from = "RawProjection")]
pub struct UldaProjection {
    pub mean: DVector<f64>,
    /// `d_in × d_out`.
    pub matrix: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProjection {
    mean: Vec<f64>,
    /// Row-major: one row per input feature.
    matrix: Vec<Vec<f64>>,
    d_out: usize,
}

impl From<UldaProjection> for RawProjection {
    fn from(p: UldaProjection) -> Self {
        Self {
            d_out: p.d_out(),
            mean: p.mean.iter().copied().collect(),
            matrix: p
                .matrix
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }
}

impl TryFrom<RawProjection> for UldaProjection {
    type Error = Error;

    fn try_from(raw: RawProjection) -> Result<Self> {
        let d_in = raw.mean.len();
        if raw.matrix.len() != d_in || raw.matrix.iter().any(|r| r.len() != raw.d_out) {
            return Err(Error::DimensionMismatch {
                expected: d_in,
                found: raw.matrix.len(),
            });
        }
        Ok(Self {
            mean: DVector::from_vec(raw.mean),
            matrix: DMatrix::from_fn(d_in, raw.d_out, |i, j| raw.matrix[i][j]),
        })
    }
}

impl UldaProjection {
    pub fn d_in(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn d_out(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Right singular vectors and singular values sorted by decreasing value.
fn sorted_svd(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    (values, v)
}

fn rank(values: &[f64]) -> usize {
    let max = values.first().copied().unwrap_or(0.0);
    if !(max > 0.0) {
        return 0;
    }
    values.iter().filter(|&&s| s > RANK_TOLERANCE * max).count()
}

/// Fit ULDA on `x` (one sample per row) with labels in `0..n_classes`.
///
/// Keeps at most `n_classes - 1` directions. Column signs are fixed so the
/// largest-magnitude entry of each column is positive.
pub fn fit_ulda(x: &DMatrix<f64>, y: &[usize], n_classes: usize) -> Result<UldaProjection> {
    let (n, d) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if d == 0 {
        return Err(Error::RankZero);
    }
    let counts = class_counts(y, n_classes, 2)?;
    let nf = n as f64;

    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }

    // Total scatter St = Htᵀ Ht with Ht = Xc / √n.
    let (sigma, v) = sorted_svd(&centered / nf.sqrt());
    let t = rank(&sigma);
    if t == 0 {
        return Err(Error::RankZero);
    }
    let whiten = DMatrix::from_fn(d, t, |r, c| v[(r, c)] / sigma[c]);

    // Between-class factor Hb: row k = √(n_k/n) (μ_k − μ).
    let mut class_sums = DMatrix::<f64>::zeros(n_classes, d);
    for (row, &label) in centered.row_iter().zip(y) {
        let mut target = class_sums.row_mut(label);
        target += row;
    }
    for (k, mut row) in class_sums.row_iter_mut().enumerate() {
        let nk = counts[k] as f64;
        row *= (nk / nf).sqrt() / nk;
    }
    let between = class_sums * &whiten;

    let (lambda, q) = sorted_svd(between);
    let q_keep = rank(&lambda).min(n_classes - 1);
    if q_keep == 0 {
        return Err(Error::DegenerateClasses(
            "class means coincide; no discriminant direction".into(),
        ));
    }
    let mut matrix = whiten * q.columns(0, q_keep);
    for mut col in matrix.column_iter_mut() {
        let pivot = col.iter().copied().fold(0.0f64, |best, v| {
            if v.abs() > best.abs() {
                v
            } else {
                best
            }
        });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
    Ok(UldaProjection { mean, matrix })
}

/// Project rows of `x` with a fitted transform.
pub fn project(p: &UldaProjection, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() != p.d_in() {
        return Err(Error::DimensionMismatch {
            expected: p.d_in(),
            found: x.ncols(),
        });
    }
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= p.mean.transpose();
    }
    Ok(centered * &p.matrix)
}
