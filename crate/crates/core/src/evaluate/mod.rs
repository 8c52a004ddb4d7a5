//! Cross-validation, metrics, sweeps and statistical comparison.

mod anova;
mod cv;
mod metrics;

pub use anova::{compare_groups, f_survival, ln_gamma, regularized_beta, AnovaResult};
pub use cv::{
    compare_reports, condition, crossvalidate, crossvalidate_prepared, default_snrs, default_window_sizes, fold_data, prepare,
    sweep_snr, sweep_window, write_long_csv, EvalConfig, EvalReport, FoldData, FoldError, FoldModel, FoldResult,
    MeanStd, Prepared, PreparedSubject, ReportConfig, CSV_HEADER,
};
pub use metrics::{metrics, ClassValues, ConfusionMatrix, MetricName, Metrics, Undefined};
