use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ModelSpec;

const TAU: f64 = 1e-12;

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    (-gamma * d2).exp()
}

/// Two-class RBF machine: `f(x) = Σ coef_i K(sv_i, x) − rho`, positive for the first class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub positive: usize,
    pub negative: usize,
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i y_i` for each support vector.
    pub coef: Vec<f64>,
    pub rho: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub grad: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// SMO with second-order working-set selection on a precomputed kernel.
/// Stops once the maximal KKT violation falls below `tol` or after `max_iter` updates.
pub(crate) fn solve_dual(k: &DMatrix<f64>, y: &[f64], c: f64, tol: f64, max_iter: usize) -> DualSolution {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !in_low(y[t], alpha[t], c) {
                continue;
            }
            let v = -y[t] * grad[t];
            gmin = gmin.min(v);
            if i != usize::MAX && v < gmax {
                let b = gmax - v;
                let mut a = k[(i, i)] + k[(t, t)] - 2.0 * k[(i, t)];
                if a <= 0.0 {
                    a = TAU;
                }
                if -b * b / a <= best {
                    best = -b * b / a;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (ai, aj) = (alpha[i], alpha[j]);
        let mut quad = k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k[(t, i)] * di + y[j] * k[(t, j)] * dj);
        }
    }

    let rho = bias(&alpha, &grad, y, c);
    DualSolution {
        alpha,
        grad,
        rho,
        iterations,
        converged,
    }
}

fn bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum, mut free) = (0.0, 0usize);
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            sum += yg;
            free += 1;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

impl BinarySvm {
    fn fit(points: &[&[f64]], y: &[f64], positive: usize, negative: usize, spec: &ModelSpec) -> Self {
        let gamma = 1.0 / (2.0 * spec.svm_sigma * spec.svm_sigma);
        let n = points.len();
        let k = DMatrix::from_fn(n, n, |a, b| rbf(points[a], points[b], gamma));
        let sol = solve_dual(&k, y, spec.svm_c, spec.svm_tol, spec.svm_max_passes * n);
        let (mut support_vectors, mut coef) = (Vec::new(), Vec::new());
        for t in 0..n {
            if sol.alpha[t] > 0.0 {
                support_vectors.push(points[t].to_vec());
                coef.push(sol.alpha[t] * y[t]);
            }
        }
        Self {
            positive,
            negative,
            support_vectors,
            coef,
            rho: sol.rho,
            gamma,
            iterations: sol.iterations,
            converged: sol.converged,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coef)
            .map(|(sv, c)| c * rbf(sv, x, self.gamma))
            .sum::<f64>()
            - self.rho
    }
}

/// One-vs-one ensemble of RBF machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub dims: usize,
    pub n_classes: usize,
    pub machines: Vec<BinarySvm>,
}

impl SvmModel {
    pub fn fit(x: &DMatrix<f64>, y: &[usize], n_classes: usize, spec: &ModelSpec) -> Self {
        let rows: Vec<Vec<f64>> = x.row_iter().map(|r| r.iter().copied().collect()).collect();
        let mut machines = Vec::new();
        for a in 0..n_classes {
            for b in a + 1..n_classes {
                let idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == a || y[i] == b).collect();
                let pts: Vec<&[f64]> = idx.iter().map(|&i| rows[i].as_slice()).collect();
                let signs: Vec<f64> = idx.iter().map(|&i| if y[i] == a { 1.0 } else { -1.0 }).collect();
                machines.push(BinarySvm::fit(&pts, &signs, a, b, spec));
            }
        }
        Self {
            dims: x.ncols(),
            n_classes,
            machines,
        }
    }

    /// Majority vote; ties go to the larger summed decision value, then the lower index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        let mut margin = vec![0.0; self.n_classes];
        for m in &self.machines {
            let f = m.decision(x);
            if f > 0.0 {
                votes[m.positive] += 1;
            } else {
                votes[m.negative] += 1;
            }
            margin[m.positive] += f;
            margin[m.negative] -= f;
        }
        let mut best = 0;
        for k in 1..self.n_classes {
            if votes[k] > votes[best] || (votes[k] == votes[best] && margin[k] > margin[best]) {
                best = k;
            }
        }
        best
    }
}
