//! `myorec`: EMG pattern-recognition experiments from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use myorec::classify::{Distance, ModelKind, ModelSpec};
use myorec::evaluate::MetricName;
use myorec::select::Objective;

use config::{parse_feature_list, parse_feature_set, CommandName, Preset, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "myorec", version, about = "Time-domain EMG feature extraction, ULDA reduction and trial-wise evaluation")]
struct Cli {
    /// JSON run configuration; a `run.json` from an earlier run replays it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed from which every randomized stage derives its own seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (all cores when absent).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory receiving all outputs and `run.json`.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one feature row per analysis window.
    Extract(PipelineArgs),
    /// Leave-one-trial-out cross-validation of feature sets and classifiers.
    Evaluate(PipelineArgs),
    /// Cross-validation over window lengths (default 50 to 350 ms in 50 ms steps).
    SweepWindow {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Window lengths in ms, comma separated.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<f64>>,
    },
    /// Cross-validation with white Gaussian noise mixed into the raw signal (default 0 to 20 dB in 1 dB steps).
    SweepSnr {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// SNR values in dB, comma separated.
        #[arg(long, value_delimiter = ',')]
        snrs: Option<Vec<f64>>,
    },
    /// Greedy forward feature selection.
    Select {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Candidate features, comma separated (default: the full 32-feature catalog).
        #[arg(long)]
        pool: Option<String>,
        /// Minimum gain in percentage points of the objective to accept a feature (default 0.25).
        #[arg(long)]
        threshold: Option<f64>,
        /// Selection objective: macro_f1 or ovr_accuracy.
        #[arg(long)]
        objective: Option<Objective>,
    },
    /// Class separability (RES index) of the first two ULDA features.
    Res(ScatterArgs),
    /// Export the first two ULDA features, min-max normalized, for plotting.
    Scatter(ScatterArgs),
    /// One-way ANOVA with Bonferroni correction over groups of report files.
    Compare {
        /// One group per flag: report JSON files, comma separated.
        #[arg(long = "group")]
        groups: Vec<String>,
        /// Metric compared: accuracy, ovr_accuracy, sensitivity, specificity, precision or f1.
        #[arg(long)]
        metric: Option<MetricName>,
        /// Number of comparisons for the Bonferroni correction.
        #[arg(long)]
        comparisons: Option<usize>,
    },
    /// Generate a seeded synthetic dataset as CSV files plus `manifest.json`.
    Synth {
        /// separable (distinct gains and bands) or amplitude (gains only).
        #[arg(long, value_parser = parse_preset)]
        preset: Option<Preset>,
        /// Gain ratio between neighbouring levels of the amplitude preset.
        #[arg(long)]
        contrast: Option<f64>,
        #[arg(long)]
        subjects: Option<usize>,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase())).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Default)]
struct PipelineArgs {
    /// Dataset `manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Feature set, repeatable: FS1..FS4, PROPOSED, FS2+LMAV+NSV or CUSTOM:MAV,RMS.
    #[arg(long = "feature-set")]
    feature_sets: Vec<String>,
    /// Classifier, repeatable: qda, svm or knn.
    #[arg(long = "classifier")]
    classifiers: Vec<ModelKind>,
    /// Analysis window in ms (250 in the reference configuration).
    #[arg(long)]
    window_ms: Option<f64>,
    /// Overlap between consecutive windows in ms (0: disjoint windows).
    #[arg(long)]
    overlap_ms: Option<f64>,
    /// Mix white Gaussian noise at this SNR (dB, relative to measured signal power) before filtering.
    #[arg(long)]
    snr_db: Option<f64>,
    /// Bandpass lower edge in Hz (default 20).
    #[arg(long)]
    band_low: Option<f64>,
    /// Bandpass upper edge in Hz (default 500).
    #[arg(long)]
    band_high: Option<f64>,
    /// Notch frequency in Hz, or `none` (default 50).
    #[arg(long)]
    notch: Option<String>,
    /// Butterworth prototype order (default 4).
    #[arg(long)]
    filter_order: Option<usize>,
    /// Shrinkage of the QDA covariances towards a scaled identity (default 0.001).
    #[arg(long)]
    qda_shrinkage: Option<f64>,
    /// Share one covariance across classes (linear boundaries).
    #[arg(long)]
    qda_pooled: bool,
    /// RBF kernel width of the SVM (default 1).
    #[arg(long)]
    svm_sigma: Option<f64>,
    /// SVM box constraint (default 1).
    #[arg(long)]
    svm_c: Option<f64>,
    /// SVM KKT tolerance (default 0.001).
    #[arg(long)]
    svm_tol: Option<f64>,
    /// SVM iteration budget in multiples of the training-set size (default 10).
    #[arg(long)]
    svm_max_passes: Option<usize>,
    /// Neighbours of the KNN classifier (default 3).
    #[arg(long)]
    knn_k: Option<usize>,
    /// KNN distance: l1 (cityblock, default) or l2.
    #[arg(long, value_parser = parse_distance)]
    knn_metric: Option<Distance>,
}

fn parse_distance(s: &str) -> Result<Distance, String> {
    match s.to_ascii_lowercase().as_str() {
        "l1" | "cityblock" | "manhattan" => Ok(Distance::L1),
        "l2" | "euclidean" => Ok(Distance::L2),
        other => Err(format!("unknown distance {other:?}")),
    }
}

#[derive(Args, Debug)]
struct ScatterArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Only this subject (default: every subject).
    #[arg(long)]
    subject: Option<String>,
    /// Keep the first N windows of each trial (5 reproduces a 300-point plot of 10 movements x 6 trials).
    #[arg(long)]
    windows_per_trial: Option<usize>,
}

impl PipelineArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(m) = &self.manifest {
            cfg.manifest = Some(m.clone());
        }
        if !self.feature_sets.is_empty() {
            cfg.feature_sets = self.feature_sets.iter().map(|s| parse_feature_set(s)).collect::<Result<_>>()?;
        }
        if !self.classifiers.is_empty() {
            let base = cfg.classifiers.first().copied().unwrap_or_default();
            cfg.classifiers = self.classifiers.iter().map(|&kind| ModelSpec { kind, ..base }).collect();
        }
        let e = &mut cfg.eval;
        set(&mut e.window_ms, self.window_ms);
        set(&mut e.overlap_ms, self.overlap_ms);
        if self.snr_db.is_some() {
            e.snr_db = self.snr_db;
        }
        set(&mut e.filter.band_low_hz, self.band_low);
        set(&mut e.filter.band_high_hz, self.band_high);
        set(&mut e.filter.order, self.filter_order);
        if let Some(n) = &self.notch {
            e.filter.notch_hz = match n.to_ascii_lowercase().as_str() {
                "none" | "off" => None,
                v => Some(v.parse().map_err(|_| anyhow::anyhow!("invalid notch frequency {v:?}"))?),
            };
        }
        for m in &mut cfg.classifiers {
            set(&mut m.qda_shrinkage, self.qda_shrinkage);
            m.qda_pooled |= self.qda_pooled;
            set(&mut m.svm_sigma, self.svm_sigma);
            set(&mut m.svm_c, self.svm_c);
            set(&mut m.svm_tol, self.svm_tol);
            set(&mut m.svm_max_passes, self.svm_max_passes);
            set(&mut m.knn_k, self.knn_k);
            set(&mut m.knn_metric, self.knn_metric);
        }
        Ok(())
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.master_seed, cli.seed);
    match &cli.command {
        None => {}
        Some(Command::Extract(p)) => {
            cfg.command = Some(CommandName::Extract);
            p.apply(&mut cfg)?;
        }
        Some(Command::Evaluate(p)) => {
            cfg.command = Some(CommandName::Evaluate);
            p.apply(&mut cfg)?;
        }
        Some(Command::SweepWindow { pipeline, sizes }) => {
            cfg.command = Some(CommandName::SweepWindow);
            pipeline.apply(&mut cfg)?;
            set(&mut cfg.window_sizes, sizes.clone());
        }
        Some(Command::SweepSnr { pipeline, snrs }) => {
            cfg.command = Some(CommandName::SweepSnr);
            pipeline.apply(&mut cfg)?;
            set(&mut cfg.snrs, snrs.clone());
        }
        Some(Command::Select {
            pipeline,
            pool,
            threshold,
            objective,
        }) => {
            cfg.command = Some(CommandName::Select);
            pipeline.apply(&mut cfg)?;
            if let Some(p) = pool {
                cfg.select.pool = parse_feature_list(p)?;
            }
            set(&mut cfg.select.improvement_threshold, *threshold);
            set(&mut cfg.select.objective, *objective);
        }
        Some(Command::Res(a)) | Some(Command::Scatter(a)) => {
            cfg.command = Some(if matches!(cli.command, Some(Command::Res(_))) {
                CommandName::Res
            } else {
                CommandName::Scatter
            });
            a.pipeline.apply(&mut cfg)?;
            if a.subject.is_some() {
                cfg.scatter.subject = a.subject.clone();
            }
            if a.windows_per_trial.is_some() {
                cfg.scatter.windows_per_trial = a.windows_per_trial;
            }
        }
        Some(Command::Compare {
            groups,
            metric,
            comparisons,
        }) => {
            cfg.command = Some(CommandName::Compare);
            if !groups.is_empty() {
                cfg.compare.groups = groups
                    .iter()
                    .map(|g| g.split(',').filter(|p| !p.trim().is_empty()).map(|p| PathBuf::from(p.trim())).collect())
                    .collect();
            }
            set(&mut cfg.compare.metric, *metric);
            set(&mut cfg.compare.comparisons, *comparisons);
        }
        Some(Command::Synth {
            preset,
            contrast,
            subjects,
        }) => {
            cfg.command = Some(CommandName::Synth);
            set(&mut cfg.synth.preset, *preset);
            set(&mut cfg.synth.contrast, *contrast);
            set(&mut cfg.synth.n_subjects, *subjects);
        }
    }
    if cfg.command.is_none() {
        bail!("no subcommand given and the configuration names none");
    }
    cfg.finalize()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = (|| -> Result<bool> {
        if let Some(n) = cli.jobs {
            rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
        }
        let cfg = resolve(&cli)?;
        commands::run(&cfg, &cli.out_dir)
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
