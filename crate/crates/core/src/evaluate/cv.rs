use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anova::{compare_groups, AnovaResult};
use super::metrics::{metrics, ConfusionMatrix, MetricName, Metrics};
use crate::classify::{predict_rows, train, ModelKind, ModelSpec, TrainedModel};
use crate::dataset::{mix_awgn, MovementLabel, Recording};
use crate::error::{Error, Result};
use crate::features::{FeatureSetSpec, Thresholds, WindowCatalog};
use crate::preprocess::{apply_filters, segment, FilterSpec, MinMax};
use crate::reduce::{fit_ulda, project, UldaProjection};
use crate::seed::derive_seed;

/// Signal-path settings shared by every fold of an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub window_ms: f64,
    pub overlap_ms: f64,
    /// AWGN mixed into the raw signal; `None` leaves it clean.
    pub snr_db: Option<f64>,
    pub filter: FilterSpec,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            window_ms: 250.0,
            overlap_ms: 0.0,
            snr_db: None,
            filter: FilterSpec::default(),
            seed: 0,
        }
    }
}

/// 50, 100, ..., 350 ms.
pub fn default_window_sizes() -> Vec<f64> {
    (1..=7).map(|k| 50.0 * k as f64).collect()
}

/// 0, 1, ..., 20 dB.
pub fn default_snrs() -> Vec<f64> {
    (0..=20).map(f64::from).collect()
}

/// Windows of one subject with their feature catalogs.
#[derive(Debug, Clone)]
pub struct PreparedSubject {
    pub subject: String,
    /// Distinct trial numbers in ascending order; fold `f` holds out `trials[f]`.
    pub trials: Vec<u32>,
    pub windows: Vec<WindowCatalog>,
    pub labels: Vec<usize>,
}

/// A dataset after noise mixing, filtering, segmentation and feature
/// computation, ready for any feature set drawn from the catalog.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub subjects: Vec<PreparedSubject>,
    pub classes: Vec<MovementLabel>,
    pub config: EvalConfig,
    pub thresholds: Thresholds,
}

impl Prepared {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }
}

fn awgn_seed(master: u64, subject: usize, rec: &Recording, snr_db: f64) -> u64 {
    derive_seed(
        master,
        "awgn",
        &[subject as u64, rec.movement.index() as u64, u64::from(rec.trial), snr_db.to_bits()],
    )
}

/// Mix noise into the raw recording (when configured) and apply the filters.
/// `subject` is the subject's position in the dataset and keys the noise seed.
pub fn condition(rec: &Recording, subject: usize, cfg: &EvalConfig) -> Result<Recording> {
    let mixed = match cfg.snr_db {
        Some(snr) => mix_awgn(rec, snr, awgn_seed(cfg.seed, subject, rec, snr))?,
        None => rec.clone(),
    };
    apply_filters(&mixed, &cfg.filter)
}

/// Mix noise, filter, segment and compute the feature catalog of every window.
pub fn prepare(dataset: &[Recording], cfg: &EvalConfig, thresholds: &Thresholds) -> Result<Prepared> {
    let mut subject_names: Vec<String> = Vec::new();
    for rec in dataset {
        if !subject_names.contains(&rec.subject_id) {
            subject_names.push(rec.subject_id.clone());
        }
    }
    let mut classes: Vec<MovementLabel> = dataset.iter().map(|r| r.movement).collect();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::DegenerateClasses(format!(
            "dataset has {} movement(s), at least 2 are needed",
            classes.len()
        )));
    }
    if let Some(rec) = dataset.first() {
        if dataset.iter().any(|r| r.n_channels() != rec.n_channels()) {
            return Err(Error::InvalidConfig("recordings differ in channel count".into()));
        }
    }

    let per_recording: Vec<Vec<WindowCatalog>> = dataset
        .par_iter()
        .map(|rec| {
            let subject = subject_names.iter().position(|s| *s == rec.subject_id).unwrap_or(0);
            segment(&condition(rec, subject, cfg)?, cfg.window_ms, cfg.overlap_ms)?
                .iter()
                .map(|w| WindowCatalog::compute(w, thresholds))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut subjects: Vec<PreparedSubject> = subject_names
        .into_iter()
        .map(|subject| PreparedSubject {
            subject,
            trials: Vec::new(),
            windows: Vec::new(),
            labels: Vec::new(),
        })
        .collect();
    for (rec, windows) in dataset.iter().zip(per_recording) {
        let s = subjects.iter_mut().find(|s| s.subject == rec.subject_id).expect("subject indexed");
        let label = classes.binary_search(&rec.movement).expect("class indexed");
        if !s.trials.contains(&rec.trial) {
            s.trials.push(rec.trial);
        }
        s.labels.extend(std::iter::repeat_n(label, windows.len()));
        s.windows.extend(windows);
    }
    for s in &mut subjects {
        s.trials.sort_unstable();
        if s.trials.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "subject {} has {} trial(s); leave-one-trial-out needs at least 2",
                s.subject,
                s.trials.len()
            )));
        }
    }
    Ok(Prepared {
        subjects,
        classes,
        config: *cfg,
        thresholds: *thresholds,
    })
}

/// Feature matrices of one fold.
#[derive(Debug, Clone)]
pub struct FoldData {
    pub train_x: DMatrix<f64>,
    pub train_y: Vec<usize>,
    pub test_x: DMatrix<f64>,
    pub test_y: Vec<usize>,
}

fn to_matrix(rows: &[Vec<f64>], width: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j])
}

/// Gather `set` for every window of `subject`, split on `held_out` trial.
pub fn fold_data(subject: &PreparedSubject, set: &FeatureSetSpec, held_out: u32) -> Result<FoldData> {
    let (mut train_rows, mut train_y, mut test_rows, mut test_y) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (w, &label) in subject.windows.iter().zip(&subject.labels) {
        let v = set.gather(w)?;
        if w.meta.trial == held_out {
            test_rows.push(v);
            test_y.push(label);
        } else {
            train_rows.push(v);
            train_y.push(label);
        }
    }
    let width = set.len_per_channel() * subject.windows.first().map_or(0, |w| w.channels.len());
    Ok(FoldData {
        train_x: to_matrix(&train_rows, width),
        train_y,
        test_x: to_matrix(&test_rows, width),
        test_y,
    })
}

/// Everything fitted on the training part of a fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldModel {
    pub scaling: MinMax,
    pub projection: UldaProjection,
    pub model: TrainedModel,
}

impl FoldModel {
    pub fn fit(x: &DMatrix<f64>, y: &[usize], n_classes: usize, spec: &ModelSpec) -> Result<Self> {
        let scaling = MinMax::fit(x);
        let normalized = scaling.apply(x)?;
        let projection = fit_ulda(&normalized, y, n_classes)?;
        let reduced = project(&projection, &normalized)?;
        let model = train(spec, &reduced, y, n_classes)?;
        Ok(Self {
            scaling,
            projection,
            model,
        })
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        predict_rows(&self.model, &project(&self.projection, &self.scaling.apply(x)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub subject: String,
    pub fold: usize,
    pub held_out_trial: u32,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    /// False if an SVM solve stopped at its iteration budget.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldError {
    pub subject: String,
    pub fold: usize,
    pub held_out_trial: u32,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single value.
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std: f64::NAN, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, n }
    }
}

/// Settings that produced a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub eval: EvalConfig,
    pub model: ModelSpec,
    pub features: FeatureSetSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: ModelKind,
    pub feature_set: String,
    pub window_ms: f64,
    pub snr_db: Option<f64>,
    pub classes: Vec<MovementLabel>,
    pub config: ReportConfig,
    pub folds: Vec<FoldResult>,
    pub errors: Vec<FoldError>,
    /// Mean ± std over all (subject, fold) pairs.
    pub summary: BTreeMap<MetricName, MeanStd>,
    /// Movement-wise F1 over all (subject, fold) pairs.
    pub per_class_f1: Vec<MeanStd>,
}

impl EvalReport {
    fn assemble(config: ReportConfig, classes: Vec<MovementLabel>, folds: Vec<FoldResult>, errors: Vec<FoldError>) -> Self {
        let summary = MetricName::ALL
            .into_iter()
            .map(|m| {
                let v: Vec<f64> = folds.iter().map(|f| f.metrics.value(m)).collect();
                (m, MeanStd::of(&v))
            })
            .collect();
        let per_class_f1 = (0..classes.len())
            .map(|k| MeanStd::of(&folds.iter().map(|f| f.metrics.f1.per_class[k]).collect::<Vec<_>>()))
            .collect();
        Self {
            classifier: config.model.kind,
            feature_set: config.features.display_name(),
            window_ms: config.eval.window_ms,
            snr_db: config.eval.snr_db,
            classes,
            config,
            folds,
            errors,
            summary,
            per_class_f1,
        }
    }

    pub fn mean(&self, m: MetricName) -> f64 {
        self.summary.get(&m).map_or(f64::NAN, |s| s.mean)
    }

    pub fn std(&self, m: MetricName) -> f64 {
        self.summary.get(&m).map_or(f64::NAN, |s| s.std)
    }

    pub fn is_complete(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.folds.iter().all(|f| f.converged)
    }

    /// Mean of `m` over the folds of each subject, in subject order.
    pub fn subject_means(&self, m: MetricName) -> Vec<f64> {
        let mut order: Vec<&str> = Vec::new();
        for f in &self.folds {
            if !order.contains(&f.subject.as_str()) {
                order.push(&f.subject);
            }
        }
        order
            .iter()
            .map(|s| {
                let v: Vec<f64> = self.folds.iter().filter(|f| f.subject == *s).map(|f| f.metrics.value(m)).collect();
                v.iter().sum::<f64>() / v.len() as f64
            })
            .collect()
    }
}

/// Leave-one-trial-out evaluation on an already prepared dataset.
pub fn crossvalidate_prepared(prepared: &Prepared, set: &FeatureSetSpec, spec: &ModelSpec) -> Result<EvalReport> {
    set.validate()?;
    spec.validate()?;
    let n_classes = prepared.n_classes();
    let jobs: Vec<(&PreparedSubject, usize, u32)> = prepared
        .subjects
        .iter()
        .flat_map(|s| s.trials.iter().enumerate().map(move |(f, &t)| (s, f, t)))
        .collect();
    let outcomes: Vec<std::result::Result<FoldResult, FoldError>> = jobs
        .par_iter()
        .map(|&(s, fold, trial)| {
            let run = || -> Result<FoldResult> {
                let data = fold_data(s, set, trial)?;
                let fitted = FoldModel::fit(&data.train_x, &data.train_y, n_classes, spec)?;
                let predicted = fitted.predict(&data.test_x)?;
                let confusion = ConfusionMatrix::from_predictions(&data.test_y, &predicted, n_classes)?;
                Ok(FoldResult {
                    subject: s.subject.clone(),
                    fold,
                    held_out_trial: trial,
                    n_train: data.train_y.len(),
                    n_test: data.test_y.len(),
                    metrics: metrics(&confusion)?,
                    confusion,
                    converged: fitted.model.converged(),
                })
            };
            run().map_err(|e| {
                log::warn!("subject {} fold {fold}: {e}", s.subject);
                FoldError {
                    subject: s.subject.clone(),
                    fold,
                    held_out_trial: trial,
                    message: e.to_string(),
                }
            })
        })
        .collect();
    let (mut folds, mut errors) = (Vec::new(), Vec::new());
    for o in outcomes {
        match o {
            Ok(f) => folds.push(f),
            Err(e) => errors.push(e),
        }
    }
    let config = ReportConfig {
        eval: prepared.config,
        model: *spec,
        features: set.clone(),
    };
    Ok(EvalReport::assemble(config, prepared.classes.clone(), folds, errors))
}

/// Leave-one-trial-out cross-validation of one feature set and classifier.
pub fn crossvalidate(dataset: &[Recording], set: &FeatureSetSpec, spec: &ModelSpec, cfg: &EvalConfig) -> Result<EvalReport> {
    let prepared = prepare(dataset, cfg, &set.thresholds)?;
    crossvalidate_prepared(&prepared, set, spec)
}

/// One cross-validation per window length.
pub fn sweep_window(
    dataset: &[Recording],
    set: &FeatureSetSpec,
    spec: &ModelSpec,
    cfg: &EvalConfig,
    sizes_ms: &[f64],
) -> Result<Vec<EvalReport>> {
    sizes_ms
        .par_iter()
        .map(|&w| crossvalidate(dataset, set, spec, &EvalConfig { window_ms: w, ..*cfg }))
        .collect()
}

/// One cross-validation per SNR, noise mixed into the raw signal.
pub fn sweep_snr(
    dataset: &[Recording],
    set: &FeatureSetSpec,
    spec: &ModelSpec,
    cfg: &EvalConfig,
    snrs_db: &[f64],
) -> Result<Vec<EvalReport>> {
    snrs_db
        .par_iter()
        .map(|&snr| crossvalidate(dataset, set, spec, &EvalConfig { snr_db: Some(snr), ..*cfg }))
        .collect()
}

/// ANOVA over groups of reports. Each group contributes the per-subject
/// means of `metric` of all its reports, concatenated.
pub fn compare_reports(groups: &[&[EvalReport]], metric: MetricName, comparisons: usize) -> Result<AnovaResult> {
    let scores: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| g.iter().flat_map(|r| r.subject_means(metric)).collect())
        .collect();
    let slices: Vec<&[f64]> = scores.iter().map(Vec::as_slice).collect();
    compare_groups(&slices, comparisons)
}

pub const CSV_HEADER: &str = "subject,fold,classifier,feature_set,window_ms,snr_db,metric,class,value";

/// Long-format rows of every fold of every report.
pub fn write_long_csv<W: Write>(mut w: W, reports: &[EvalReport]) -> Result<()> {
    let io = |e| Error::io("<csv>", e);
    writeln!(w, "{CSV_HEADER}").map_err(io)?;
    for r in reports {
        let snr = r.snr_db.map(|s| s.to_string()).unwrap_or_default();
        let set = csv_field(&r.feature_set);
        for f in &r.folds {
            let prefix = format!("{},{},{},{},{},{}", csv_field(&f.subject), f.fold, r.classifier, set, r.window_ms, snr);
            writeln!(w, "{prefix},accuracy,all,{}", f.metrics.accuracy).map_err(io)?;
            for m in MetricName::ALL.into_iter().skip(1) {
                let values = f.metrics.class_values(m).expect("per-class metric");
                writeln!(w, "{prefix},{m},macro,{}", values.macro_avg).map_err(io)?;
                for (class, v) in r.classes.iter().zip(&values.per_class) {
                    writeln!(w, "{prefix},{m},{class},{v}").map_err(io)?;
                }
            }
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
