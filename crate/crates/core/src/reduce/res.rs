//! RES index: mean pairwise centroid distance over mean class dispersion.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::class_counts;
use crate::error::{Error, Result};

/// Per-class means and standard deviations of reduced features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    /// `means[k][i]`: mean of feature `i` in class `k`.
    pub means: Vec<Vec<f64>>,
    /// `stds[k][i]`: sample standard deviation (divisor n_k − 1; 0 for a
    /// single sample).
    pub stds: Vec<Vec<f64>>,
}

impl ClassStats {
    pub fn from_data(x: &DMatrix<f64>, y: &[usize], n_classes: usize) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        let counts = class_counts(y, n_classes, 1)?;
        let dims = x.ncols();
        let mut means = vec![vec![0.0; dims]; n_classes];
        for (row, &k) in x.row_iter().zip(y) {
            for (m, v) in means[k].iter_mut().zip(row.iter()) {
                *m += v;
            }
        }
        for (m, &c) in means.iter_mut().zip(&counts) {
            m.iter_mut().for_each(|v| *v /= c as f64);
        }
        let mut stds = vec![vec![0.0; dims]; n_classes];
        for (row, &k) in x.row_iter().zip(y) {
            for ((s, v), m) in stds[k].iter_mut().zip(row.iter()).zip(&means[k]) {
                *s += (v - m) * (v - m);
            }
        }
        for (s, &c) in stds.iter_mut().zip(&counts) {
            s.iter_mut().for_each(|v| {
                *v = if c > 1 { (*v / (c - 1) as f64).sqrt() } else { 0.0 };
            });
        }
        Ok(Self { means, stds })
    }

    pub fn n_classes(&self) -> usize {
        self.means.len()
    }

    pub fn dims(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// RES over all stored dimensions.
    pub fn res(&self) -> Result<f64> {
        let k = self.n_classes();
        if k < 2 {
            return Err(Error::DegenerateClasses("RES needs at least 2 classes".into()));
        }
        let dims = self.dims();
        let mut dist_sum = 0.0;
        for p in 0..k {
            for q in p + 1..k {
                dist_sum += self.means[p]
                    .iter()
                    .zip(&self.means[q])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            }
        }
        let mean_distance = 2.0 * dist_sum / (k * (k - 1)) as f64;
        let dispersion = self.stds.iter().flatten().sum::<f64>() / (dims * k) as f64;
        if !(dispersion > 0.0) {
            return Err(Error::ZeroDispersion);
        }
        Ok(mean_distance / dispersion)
    }
}

/// RES index on the first two reduced features (`reduced` must have exactly
/// two columns).
pub fn res_index(reduced: &DMatrix<f64>, y: &[usize], n_classes: usize) -> Result<f64> {
    if reduced.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: reduced.ncols(),
        });
    }
    ClassStats::from_data(reduced, y, n_classes)?.res()
}

/// RES index generalized to every column of `reduced`.
pub fn res_index_general(reduced: &DMatrix<f64>, y: &[usize], n_classes: usize) -> Result<f64> {
    ClassStats::from_data(reduced, y, n_classes)?.res()
}
