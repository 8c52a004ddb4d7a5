//! Resolved run configuration, written to `run.json` by every command.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use myorec::classify::{ModelKind, ModelSpec};
use myorec::evaluate::{default_snrs, default_window_sizes, EvalConfig, MetricName};
use myorec::features::{FeatureId, FeatureSetSpec, SetName, Thresholds};
use myorec::seed::derive_seed;
use myorec::select::Objective;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Extract,
    Evaluate,
    SweepWindow,
    SweepSnr,
    Select,
    Res,
    Scatter,
    Compare,
    Synth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Ten movements with distinct gains and bands.
    #[default]
    Separable,
    /// Ten movements coded by channel gain only.
    Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectSettings {
    pub pool: Vec<FeatureId>,
    pub improvement_threshold: f64,
    pub objective: Objective,
}

impl Default for SelectSettings {
    fn default() -> Self {
        Self {
            pool: FeatureId::catalog(),
            improvement_threshold: 0.25,
            objective: Objective::MacroF1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatterSettings {
    /// Restrict to one subject; all subjects when absent.
    pub subject: Option<String>,
    /// Keep only the first N windows of every trial.
    pub windows_per_trial: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareSettings {
    /// Report files (JSON arrays of reports) per group.
    pub groups: Vec<Vec<PathBuf>>,
    pub metric: MetricName,
    pub comparisons: usize,
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self {
            groups: Vec::new(),
            metric: MetricName::F1,
            comparisons: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSettings {
    pub preset: Preset,
    /// Gain ratio between neighbouring levels of the amplitude preset.
    pub contrast: f64,
    pub n_subjects: usize,
    pub seed: u64,
}

impl Default for SynthSettings {
    fn default() -> Self {
        Self {
            preset: Preset::Separable,
            contrast: 2.0,
            n_subjects: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub master_seed: u64,
    pub manifest: Option<PathBuf>,
    pub feature_sets: Vec<FeatureSetSpec>,
    pub classifiers: Vec<ModelSpec>,
    pub thresholds: Thresholds,
    pub eval: EvalConfig,
    pub window_sizes: Vec<f64>,
    pub snrs: Vec<f64>,
    pub select: SelectSettings,
    pub scatter: ScatterSettings,
    pub compare: CompareSettings,
    pub synth: SynthSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            master_seed: 0,
            manifest: None,
            feature_sets: vec![FeatureSetSpec::named(SetName::Proposed).expect("registered set")],
            classifiers: vec![ModelSpec::of(ModelKind::Qda)],
            thresholds: Thresholds::default(),
            eval: EvalConfig::default(),
            window_sizes: default_window_sizes(),
            snrs: default_snrs(),
            select: SelectSettings::default(),
            scatter: ScatterSettings::default(),
            compare: CompareSettings::default(),
            synth: SynthSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        } else {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }

    /// Derive stage seeds, apply shared thresholds and make paths absolute.
    pub fn finalize(&mut self) -> Result<()> {
        self.eval.seed = derive_seed(self.master_seed, "awgn", &[]);
        self.synth.seed = derive_seed(self.master_seed, "synthetic", &[]);
        for set in &mut self.feature_sets {
            set.thresholds = self.thresholds;
        }
        if let Some(m) = &self.manifest {
            self.manifest = Some(absolute(m)?);
        }
        for group in &mut self.compare.groups {
            for p in group.iter_mut() {
                *p = absolute(p)?;
            }
        }
        for spec in &self.classifiers {
            spec.validate()?;
        }
        if self.feature_sets.is_empty() || self.classifiers.is_empty() {
            bail!("at least one feature set and one classifier are required");
        }
        Ok(())
    }
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).with_context(|| format!("resolving {}", p.display()))
}

/// `FS1`..`PROPOSED`, a registered set plus extras (`FS2+LMAV+NSV`), or an
/// explicit list (`CUSTOM:MAV,RMS,AR(3)`).
pub fn parse_feature_set(s: &str) -> Result<FeatureSetSpec> {
    let s = s.trim();
    if let Some(list) = s.strip_prefix("CUSTOM:").or_else(|| s.strip_prefix("custom:")) {
        let features = parse_feature_list(list)?;
        return Ok(FeatureSetSpec::custom(features, None)?);
    }
    let mut parts = s.split('+');
    let base: SetName = parts.next().unwrap_or_default().parse()?;
    let extra: Vec<FeatureId> = parts.map(str::parse).collect::<Result<_, _>>()?;
    Ok(if extra.is_empty() {
        FeatureSetSpec::named(base)?
    } else {
        FeatureSetSpec::augmented(base, &extra)?
    })
}

/// Comma-separated feature names; `AR(k)` may contain no comma, so a plain split works.
pub fn parse_feature_list(s: &str) -> Result<Vec<FeatureId>> {
    Ok(s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()?)
}
