
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Distance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    /// Training rows.
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    pub k: usize,
    pub metric: Distance,
}

impl KnnModel {
    pub fn fit(x: &DMatrix<f64>, y: &[usize], n_classes: usize, k: usize, metric: Distance) -> Self {
        Self {
            points: x.row_iter().map(|r| r.iter().copied().collect()).collect(),
            labels: y.to_vec(),
            n_classes,
            k,
            metric,
        }
    }

    pub fn dims(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.metric {
            Distance::L1 => a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum(),
            Distance::L2 => a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt(),
        }
    }

    /// Majority vote of the `k` nearest training points. Neighbours are
    /// ordered by (distance, label), so the result does not depend on row
    /// order; a tied vote goes to the tied class with the nearest member.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut near: Vec<(f64, usize)> = self
            .points
            .iter()
            .zip(&self.labels)
            .map(|(p, &l)| (self.distance(p, x), l))
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        let k = self.k.min(near.len());
        if k < near.len() {
            near.select_nth_unstable_by(k - 1, order);
            near.truncate(k);
        }
        near.sort_by(order);

        let mut votes = vec![0usize; self.n_classes];
        for &(_, l) in &near {
            votes[l] += 1;
        }
        let top = votes.iter().copied().max().unwrap_or(0);
        near.iter()
            .map(|&(_, l)| l)
            .find(|&l| votes[l] == top)
            .unwrap_or(0)
    }
}
