use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column bounds fitted on a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMax {
    pub fn fit(matrix: &DMatrix<f64>) -> Self {
        let (min, max) = matrix
            .column_iter()
            .map(|col| {
                col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                })
            })
            .unzip();
        Self { min, max }
    }

    /// Map each column onto [0, 1]; values outside the fitted range are
    /// clipped and constant columns map to 0.
    pub fn apply(&self, matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if matrix.ncols() != self.min.len() {
            return Err(Error::DimensionMismatch {
                expected: self.min.len(),
                found: matrix.ncols(),
            });
        }
        let mut out = matrix.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            let (lo, hi) = (self.min[j], self.max[j]);
            let span = hi - lo;
            for v in col.iter_mut() {
                *v = if span > 0.0 {
                    ((*v - lo) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

/// Min–max normalize `matrix` column-wise. With `fitted` bounds (from the
/// training fold) those are reused; otherwise bounds are fitted on `matrix`.
pub fn normalize_features(
    matrix: &DMatrix<f64>,
    fitted: Option<&MinMax>,
) -> Result<(DMatrix<f64>, MinMax)> {
    let bounds = match fitted {
        Some(b) => b.clone(),
        None => MinMax::fit(matrix),
    };
    let normalized = bounds.apply(matrix)?;
    Ok((normalized, bounds))
}
