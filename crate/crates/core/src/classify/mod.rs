//! Classifiers operating on reduced feature vectors.

mod knn;
mod qda;
mod svm;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduce::class_counts;

pub use knn::KnnModel;
pub use qda::QdaModel;
pub use svm::{BinarySvm, SvmModel};

/// Serialization format version of [`TrainedModel`] blobs.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "QDA")]
    Qda,
    #[serde(rename = "SVM_RBF")]
    SvmRbf,
    #[serde(rename = "KNN")]
    Knn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Qda, ModelKind::SvmRbf, ModelKind::Knn];
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Qda => "qda",
            ModelKind::SvmRbf => "svm",
            ModelKind::Knn => "knn",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qda" | "lda" => Ok(ModelKind::Qda),
            "svm" | "svm_rbf" => Ok(ModelKind::SvmRbf),
            "knn" => Ok(ModelKind::Knn),
            other => Err(Error::InvalidConfig(format!("unknown classifier {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    /// Manhattan (cityblock).
    #[default]
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Shrinkage towards a scaled identity: Σ ← (1−γ)Σ + γ·tr(Σ)/d·I.
    pub qda_shrinkage: f64,
    /// Share one pooled covariance across classes (linear boundaries).
    pub qda_pooled: bool,
    pub svm_sigma: f64,
    pub svm_c: f64,
    pub svm_tol: f64,
    /// Iteration budget of each binary SMO solve, in multiples of its sample count.
    pub svm_max_passes: usize,
    pub knn_k: usize,
    pub knn_metric: Distance,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: ModelKind::Qda,
            qda_shrinkage: 1e-3,
            qda_pooled: false,
            svm_sigma: 1.0,
            svm_c: 1.0,
            svm_tol: 1e-3,
            svm_max_passes: 10,
            knn_k: 3,
            knn_metric: Distance::L1,
        }
    }
}

impl ModelSpec {
    pub fn of(kind: ModelKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.qda_shrinkage) {
            return Err(Error::InvalidConfig("qda_shrinkage must lie in [0, 1]".into()));
        }
        if !(self.svm_sigma > 0.0 && self.svm_c > 0.0 && self.svm_tol > 0.0) {
            return Err(Error::InvalidConfig("svm sigma, C and tol must be positive".into()));
        }
        if self.svm_max_passes == 0 {
            return Err(Error::InvalidConfig("svm_max_passes must be at least 1".into()));
        }
        if self.knn_k == 0 || self.knn_k.is_multiple_of(2) {
            return Err(Error::InvalidConfig("knn_k must be a positive odd number".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TrainedModel {
    #[serde(rename = "QDA")]
    Qda(QdaModel),
    #[serde(rename = "SVM_RBF")]
    Svm(SvmModel),
    #[serde(rename = "KNN")]
    Knn(KnnModel),
}

#[derive(Serialize, Deserialize)]
struct ModelBlob {
    version: u32,
    model: TrainedModel,
}

impl TrainedModel {
    pub fn dims(&self) -> usize {
        match self {
            TrainedModel::Qda(m) => m.dims(),
            TrainedModel::Svm(m) => m.dims,
            TrainedModel::Knn(m) => m.dims(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::Qda(m) => m.classes.len(),
            TrainedModel::Svm(m) => m.n_classes,
            TrainedModel::Knn(m) => m.n_classes,
        }
    }

    /// False only for an SVM whose SMO solve hit its iteration budget.
    pub fn converged(&self) -> bool {
        match self {
            TrainedModel::Svm(m) => m.machines.iter().all(|b| b.converged),
            _ => true,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelBlob {
            version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let blob: ModelBlob = serde_json::from_str(s)?;
        if blob.version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported model format version {}",
                blob.version
            )));
        }
        Ok(blob.model)
    }
}

/// Train a classifier on rows of `x` with labels in `0..n_classes`.
pub fn train(spec: &ModelSpec, x: &DMatrix<f64>, y: &[usize], n_classes: usize) -> Result<TrainedModel> {
    spec.validate()?;
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    let min_count = if spec.kind == ModelKind::Qda { 2 } else { 1 };
    class_counts(y, n_classes, min_count)?;
    Ok(match spec.kind {
        ModelKind::Qda => TrainedModel::Qda(QdaModel::fit(x, y, n_classes, spec.qda_shrinkage, spec.qda_pooled)?),
        ModelKind::SvmRbf => TrainedModel::Svm(SvmModel::fit(x, y, n_classes, spec)),
        ModelKind::Knn => TrainedModel::Knn(KnnModel::fit(x, y, n_classes, spec.knn_k, spec.knn_metric)),
    })
}

/// Predict the class of one feature vector.
pub fn predict(model: &TrainedModel, x: &[f64]) -> Result<usize> {
    if x.len() != model.dims() {
        return Err(Error::DimensionMismatch {
            expected: model.dims(),
            found: x.len(),
        });
    }
    Ok(match model {
        TrainedModel::Qda(m) => m.predict(x),
        TrainedModel::Svm(m) => m.predict(x),
        TrainedModel::Knn(m) => m.predict(x),
    })
}

/// Predict every row of `x`.
pub fn predict_rows(model: &TrainedModel, x: &DMatrix<f64>) -> Result<Vec<usize>> {
    x.row_iter()
        .map(|r| predict(model, &r.iter().copied().collect::<Vec<_>>()))
        .collect()
}
