use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian class model with a regularized covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdaClass {
    pub mean: DVector<f64>,
    pub cov_inverse: DMatrix<f64>,
    pub log_det: f64,
    pub log_prior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdaModel {
    pub classes: Vec<QdaClass>,
}

fn shrink(mut cov: DMatrix<f64>, gamma: f64) -> DMatrix<f64> {
    let d = cov.nrows();
    let target = cov.trace() / d as f64;
    cov *= 1.0 - gamma;
    for i in 0..d {
        cov[(i, i)] += gamma * target;
    }
    cov
}

fn factor(cov: DMatrix<f64>, class: usize) -> Result<(DMatrix<f64>, f64)> {
    let chol = cov.cholesky().ok_or(Error::SingularCovariance { class })?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    if !log_det.is_finite() {
        return Err(Error::SingularCovariance { class });
    }
    Ok((chol.inverse(), log_det))
}

impl QdaModel {
    pub fn fit(x: &DMatrix<f64>, y: &[usize], n_classes: usize, gamma: f64, pooled: bool) -> Result<Self> {
        let d = x.ncols();
        let n = x.nrows();
        let mut means = Vec::with_capacity(n_classes);
        let mut scatters = Vec::with_capacity(n_classes);
        let mut counts = Vec::with_capacity(n_classes);
        for k in 0..n_classes {
            let rows: Vec<usize> = (0..n).filter(|&i| y[i] == k).collect();
            let mut mean = DVector::zeros(d);
            for &i in &rows {
                mean += x.row(i).transpose();
            }
            mean /= rows.len() as f64;
            let mut scatter = DMatrix::zeros(d, d);
            for &i in &rows {
                let c = x.row(i).transpose() - &mean;
                scatter.ger(1.0, &c, &c, 1.0);
            }
            means.push(mean);
            scatters.push(scatter);
            counts.push(rows.len());
        }

        let shared = if pooled {
            let total: DMatrix<f64> = scatters.iter().sum();
            let cov = shrink(total / (n - n_classes) as f64, gamma);
            Some(factor(cov, 0)?)
        } else {
            None
        };

        let classes = (0..n_classes)
            .map(|k| {
                let (cov_inverse, log_det) = match &shared {
                    Some(s) => s.clone(),
                    None => factor(shrink(&scatters[k] / (counts[k] - 1) as f64, gamma), k)?,
                };
                Ok(QdaClass {
                    mean: means[k].clone(),
                    cov_inverse,
                    log_det,
                    log_prior: (counts[k] as f64 / n as f64).ln(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { classes })
    }

    pub fn dims(&self) -> usize {
        self.classes.first().map_or(0, |c| c.mean.len())
    }

    /// `ln π_k − ½ ln|Σ_k| − ½ (x−μ_k)ᵀ Σ_k⁻¹ (x−μ_k)` for every class.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        self.classes
            .iter()
            .map(|c| {
                let diff = &x - &c.mean;
                let quad = diff.dot(&(&c.cov_inverse * &diff));
                c.log_prior - 0.5 * c.log_det - 0.5 * quad
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in v.iter().enumerate() {
        if s > v[best] {
            best = i;
        }
    }
    best
}
