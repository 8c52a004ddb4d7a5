//! Recordings, dataset manifests and signal sources.

mod csv;
mod noise;
mod synthetic;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use self::csv::{load_dataset, load_manifest, read_recording_csv, save_dataset, write_recording_csv};
pub use self::noise::{estimate_snr, mix_awgn, NO_MIX};
pub use self::synthetic::{generate_synthetic, SyntheticSpec};

/// The ten finger movements: five individual flexions and five combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MovementLabel {
    T,
    I,
    M,
    R,
    L,
    TI,
    TM,
    TR,
    TL,
    HC,
}

impl MovementLabel {
    pub const ALL: [MovementLabel; 10] = [
        MovementLabel::T,
        MovementLabel::I,
        MovementLabel::M,
        MovementLabel::R,
        MovementLabel::L,
        MovementLabel::TI,
        MovementLabel::TM,
        MovementLabel::TR,
        MovementLabel::TL,
        MovementLabel::HC,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MovementLabel::T => "T",
            MovementLabel::I => "I",
            MovementLabel::M => "M",
            MovementLabel::R => "R",
            MovementLabel::L => "L",
            MovementLabel::TI => "TI",
            MovementLabel::TM => "TM",
            MovementLabel::TR => "TR",
            MovementLabel::TL => "TL",
            MovementLabel::HC => "HC",
        }
    }
}

impl fmt::Display for MovementLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MovementLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MovementLabel::ALL
            .iter()
            .copied()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown movement label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Volts,
    AdcCounts,
}

/// One subject/movement/trial recording, stored channel-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    pub subject_id: String,
    pub movement: MovementLabel,
    pub trial: u32,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub units: Units,
    pub channels: Vec<Vec<f64>>,
}

impl Recording {
    pub fn new(
        subject_id: impl Into<String>,
        movement: MovementLabel,
        trial: u32,
        sample_rate_hz: f64,
        channels: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let rec = Self {
            subject_id: subject_id.into(),
            movement,
            trial,
            sample_rate_hz,
            units: Units::Volts,
            channels,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if self.trial < 1 {
            return Err(Error::InvalidConfig("trial numbers start at 1".into()));
        }
        let n = self.n_samples();
        if self.channels.is_empty() || n == 0 {
            return Err(Error::InvalidConfig("recording has no samples".into()));
        }
        if self.channels.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidConfig("channels have unequal lengths".into()));
        }
        Ok(())
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_samples(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sample_rate_hz
    }

    /// Copy of the metadata with new sample data.
    pub fn with_channels(&self, channels: Vec<Vec<f64>>) -> Self {
        Self {
            subject_id: self.subject_id.clone(),
            movement: self.movement,
            trial: self.trial,
            sample_rate_hz: self.sample_rate_hz,
            units: self.units,
            channels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    TwoChannelCsv,
    Synthetic,
}

/// On-disk description of a dataset (`manifest.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub root_path: PathBuf,
    pub layout: Layout,
    pub subjects: Vec<String>,
    pub movements: Vec<MovementLabel>,
    #[serde(default = "default_trials")]
    pub trials_per_movement: u32,
    pub sample_rate_hz: f64,
    /// Relative file path with `{movement}` and `{trial}` placeholders and an
    /// optional `{subject}`. Without `{subject}`, files live under
    /// `root_path/<subject>/`.
    #[serde(default = "default_template")]
    pub filename_template: String,
    /// Expected column count; two when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_channels: Option<usize>,
    #[serde(default)]
    pub units: Units,
    /// Generator parameters for the `synthetic` layout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
}

fn default_trials() -> u32 {
    6
}

fn default_template() -> String {
    "{movement}_{trial}.csv".to_string()
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_movement < 2 {
            return Err(Error::InvalidConfig(
                "trials_per_movement must be at least 2 for leave-one-trial-out".into(),
            ));
        }
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidConfig("sample_rate_hz must be positive".into()));
        }
        if self.layout == Layout::Synthetic && self.synthetic.is_none() {
            return Err(Error::InvalidConfig(
                "synthetic layout needs a `synthetic` block".into(),
            ));
        }
        Ok(())
    }

    pub fn expected_channels(&self) -> usize {
        self.n_channels.unwrap_or(2)
    }

    /// Path of one trial file, relative paths resolved against `root_path`.
    pub fn file_path(&self, subject: &str, movement: MovementLabel, trial: u32) -> PathBuf {
        let name = self
            .filename_template
            .replace("{subject}", subject)
            .replace("{movement}", movement.as_str())
            .replace("{trial}", &trial.to_string());
        if self.filename_template.contains("{subject}") {
            self.root_path.join(name)
        } else {
            self.root_path.join(subject).join(name)
        }
    }

    /// Resolve a relative `root_path` against the directory holding the manifest.
    pub fn rooted_at(mut self, manifest_dir: &Path) -> Self {
        if self.root_path.is_relative() {
            self.root_path = manifest_dir.join(&self.root_path);
        }
        self
    }
}
