use std::path::PathBuf;

use crate::features::FeatureId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing file: {}", path.display())]
    MissingFile { path: PathBuf },

    #[error("{}:{line}: malformed row: {reason}", path.display())]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{}: expected {expected} channels, found {found}", path.display())]
    ChannelCountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("invalid band {low_hz}..{high_hz} Hz for sample rate {sample_rate_hz} Hz")]
    InvalidBand {
        low_hz: f64,
        high_hz: f64,
        sample_rate_hz: f64,
    },

    #[error("channel {channel} has zero power")]
    ZeroPowerChannel { channel: usize },

    #[error("active RMS {active_rms} does not exceed noise RMS {noise_rms}")]
    SignalBelowNoise { active_rms: f64, noise_rms: f64 },

    #[error("sample rate {sample_rate_hz} Hz is not above twice the band edge {band_high_hz} Hz")]
    NyquistViolation {
        sample_rate_hz: f64,
        band_high_hz: f64,
    },

    #[error("window of {window} samples is longer than the trial ({available} samples)")]
    WindowLongerThanTrial { window: usize, available: usize },

    #[error("feature {feature} needs at least {needed} samples, window has {got}")]
    WindowTooShort {
        feature: FeatureId,
        needed: usize,
        got: usize,
    },

    #[error("degenerate classes: {0}")]
    DegenerateClasses(String),

    #[error("all features are constant; nothing to project")]
    RankZero,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("all class dispersions are zero")]
    ZeroDispersion,

    #[error("covariance of class {class} is singular")]
    SingularCovariance { class: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("at least two groups with data are required")]
    InsufficientGroups,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile { path }
        } else {
            Error::Io { path, source }
        }
    }
}
