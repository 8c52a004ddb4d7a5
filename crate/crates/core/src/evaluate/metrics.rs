use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts indexed `[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn from_predictions(truth: &[usize], predicted: &[usize], n_classes: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                found: predicted.len(),
            });
        }
        let mut cm = Self::new(n_classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= n_classes || p >= n_classes {
                return Err(Error::DimensionMismatch {
                    expected: n_classes,
                    found: t.max(p) + 1,
                });
            }
            cm.counts[t][p] += 1;
        }
        Ok(cm)
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|k| self.counts[k][k]).sum()
    }

    /// One-vs-rest counts `(tp, fn, fp, tn)` for class `k`.
    pub fn one_vs_rest(&self, k: usize) -> (u64, u64, u64, u64) {
        let tp = self.counts[k][k];
        let row: u64 = self.counts[k].iter().sum();
        let col: u64 = self.counts.iter().map(|r| r[k]).sum();
        let fn_ = row - tp;
        let fp = col - tp;
        (tp, fn_, fp, self.total() - tp - fn_ - fp)
    }

    pub fn add(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n_classes() != self.n_classes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_classes(),
                found: other.n_classes(),
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Accuracy,
    OvrAccuracy,
    Sensitivity,
    Specificity,
    Precision,
    F1,
}

impl MetricName {
    pub const ALL: [MetricName; 6] = [
        MetricName::Accuracy,
        MetricName::OvrAccuracy,
        MetricName::Sensitivity,
        MetricName::Specificity,
        MetricName::Precision,
        MetricName::F1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Accuracy => "accuracy",
            MetricName::OvrAccuracy => "ovr_accuracy",
            MetricName::Sensitivity => "sensitivity",
            MetricName::Specificity => "specificity",
            MetricName::Precision => "precision",
            MetricName::F1 => "f1",
        }
    }
}

impl std::fmt::Display for MetricName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s || (s == "macro_f1" && *m == MetricName::F1))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown metric {s:?}")))
    }
}

/// Per-class values and their unweighted mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassValues {
    pub per_class: Vec<f64>,
    pub macro_avg: f64,
}

impl ClassValues {
    fn new(per_class: Vec<f64>) -> Self {
        let macro_avg = per_class.iter().sum::<f64>() / per_class.len() as f64;
        Self { per_class, macro_avg }
    }
}

/// A metric that was 0/0 for some class and reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Undefined {
    pub metric: MetricName,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Multiclass accuracy, trace / total.
    pub accuracy: f64,
    /// One-vs-rest accuracy `(TP + TN) / total` of each class.
    pub ovr_accuracy: ClassValues,
    pub sensitivity: ClassValues,
    pub specificity: ClassValues,
    pub precision: ClassValues,
    pub f1: ClassValues,
    pub undefined: Vec<Undefined>,
}

impl Metrics {
    /// Scalar summary: `accuracy` itself, otherwise the macro average.
    pub fn value(&self, m: MetricName) -> f64 {
        match m {
            MetricName::Accuracy => self.accuracy,
            _ => self.class_values(m).map_or(f64::NAN, |v| v.macro_avg),
        }
    }

    pub fn class_values(&self, m: MetricName) -> Option<&ClassValues> {
        match m {
            MetricName::Accuracy => None,
            MetricName::OvrAccuracy => Some(&self.ovr_accuracy),
            MetricName::Sensitivity => Some(&self.sensitivity),
            MetricName::Specificity => Some(&self.specificity),
            MetricName::Precision => Some(&self.precision),
            MetricName::F1 => Some(&self.f1),
        }
    }
}

/// Accuracy, sensitivity, specificity, precision and F1 of a confusion matrix.
pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 || cm.n_classes() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut undefined = Vec::new();
    let mut ratio = |num: u64, den: u64, metric: MetricName, class: usize| {
        if den == 0 {
            undefined.push(Undefined { metric, class });
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let k = cm.n_classes();
    let (mut ovr, mut sens, mut spec, mut prec, mut f1) =
        (Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k));
    for c in 0..k {
        let (tp, fn_, fp, tn) = cm.one_vs_rest(c);
        ovr.push((tp + tn) as f64 / total as f64);
        sens.push(ratio(tp, tp + fn_, MetricName::Sensitivity, c));
        spec.push(ratio(tn, tn + fp, MetricName::Specificity, c));
        prec.push(ratio(tp, tp + fp, MetricName::Precision, c));
        f1.push(ratio(2 * tp, 2 * tp + fp + fn_, MetricName::F1, c));
    }
    Ok(Metrics {
        accuracy: cm.trace() as f64 / total as f64,
        ovr_accuracy: ClassValues::new(ovr),
        sensitivity: ClassValues::new(sens),
        specificity: ClassValues::new(spec),
        precision: ClassValues::new(prec),
        f1: ClassValues::new(f1),
        undefined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_hand_case() {
        let cm = ConfusionMatrix {
            counts: vec![vec![8, 2], vec![3, 7]],
        };
        let m = metrics(&cm).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert!((m.sensitivity.per_class[0] - 0.8).abs() < 1e-12);
        assert!((m.specificity.per_class[0] - 0.7).abs() < 1e-12);
        assert!((m.precision.per_class[0] - 8.0 / 11.0).abs() < 1e-12);
        assert!((m.f1.per_class[0] - 16.0 / 21.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_matrix() {
        let mut cm = ConfusionMatrix::new(10);
        for k in 0..10 {
            cm.counts[k][k] = 20;
        }
        let m = metrics(&cm).unwrap();
        for name in MetricName::ALL {
            assert_eq!(m.value(name), 1.0, "{name}");
        }
        assert!(m.undefined.is_empty());
    }

    #[test]
    fn constant_classifier() {
        let mut cm = ConfusionMatrix::new(10);
        for k in 0..10 {
            cm.counts[k][3] = 20;
        }
        let m = metrics(&cm).unwrap();
        assert!((m.accuracy - 0.1).abs() < 1e-15);
        assert!((m.sensitivity.macro_avg - 0.1).abs() < 1e-15);
        assert_eq!(m.undefined.iter().filter(|u| u.metric == MetricName::Precision).count(), 9);
    }

    #[test]
    fn f1_is_harmonic_mean() {
        let cm = ConfusionMatrix {
            counts: vec![vec![5, 3, 1], vec![2, 9, 0], vec![4, 1, 6]],
        };
        let m = metrics(&cm).unwrap();
        for k in 0..3 {
            let (p, s) = (m.precision.per_class[k], m.sensitivity.per_class[k]);
            assert!((m.f1.per_class[k] - 2.0 * p * s / (p + s)).abs() < 1e-12);
        }
        assert_eq!(m.accuracy, 20.0 / 31.0);
    }

    #[test]
    fn empty_class_flagged() {
        let cm = ConfusionMatrix {
            counts: vec![vec![4, 0], vec![0, 0]],
        };
        let m = metrics(&cm).unwrap();
        assert!(m.undefined.contains(&Undefined { metric: MetricName::Sensitivity, class: 1 }));
        assert_eq!(m.sensitivity.per_class[1], 0.0);
    }

    #[test]
    fn empty_matrix() {
        assert!(matches!(metrics(&ConfusionMatrix::new(3)), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn counts_consistent() {
        let cm = ConfusionMatrix::from_predictions(&[0, 0, 1, 2, 2, 2], &[0, 1, 1, 2, 0, 2], 3).unwrap();
        assert_eq!(cm.total(), 6);
        for k in 0..3 {
            let (tp, fn_, fp, tn) = cm.one_vs_rest(k);
            assert_eq!(tp + fn_ + fp + tn, 6);
        }
        assert_eq!(cm.one_vs_rest(0), (1, 1, 1, 3));
    }
}
