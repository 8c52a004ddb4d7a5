//! Seeded band-limited Gaussian test signals with class-coded channel gains.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MovementLabel, Recording, Units};
use crate::error::{Error, Result};
use crate::preprocess::filter::{butterworth_bandpass, Cascade};
use crate::seed::{derive_seed, rng};

const WARMUP_S: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_subjects: usize,
    pub n_channels: usize,
    pub n_movements: usize,
    pub n_trials: u32,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    /// RMS of each movement's channels, `n_movements × n_channels`.
    pub class_gain_matrix: Vec<Vec<f64>>,
    pub band: (f64, f64),
    /// Optional band per movement and channel (`n_movements × n_channels`)
    /// overriding `band`, giving classes a spectral signature in addition
    /// to their gains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_bands: Option<Vec<Vec<(f64, f64)>>>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Ten movements, two channels, six 5 s trials at 2 kHz. Every pair of
    /// movements differs by at least 2x in one channel's gain, and each
    /// (movement, channel) has its own band, with center and width drawn
    /// independently from two fixed permutations.
    pub fn separable_ten_class(seed: u64) -> Self {
        let levels = [(1, 8), (2, 4), (4, 2), (8, 1), (1, 1), (2, 2), (4, 4), (8, 8), (1, 4), (4, 1)];
        let class_gain_matrix = levels
            .iter()
            .map(|&(a, b)| vec![0.05 * a as f64, 0.05 * b as f64])
            .collect();
        const CENTER: [[usize; 10]; 2] = [[3, 7, 0, 5, 9, 1, 6, 2, 8, 4], [1, 5, 8, 3, 0, 7, 4, 9, 2, 6]];
        const WIDTH: [[usize; 10]; 2] = [[6, 2, 9, 0, 4, 8, 1, 5, 3, 7], [8, 0, 4, 7, 2, 6, 9, 3, 5, 1]];
        let class_bands = (0..10)
            .map(|m| {
                (0..2)
                    .map(|c| {
                        let center = 90.0 + 36.0 * CENTER[c][m] as f64;
                        let half = (40.0 + 12.0 * WIDTH[c][m] as f64) / 2.0;
                        (center - half, center + half)
                    })
                    .collect()
            })
            .collect();
        Self {
            n_subjects: 1,
            n_channels: 2,
            n_movements: 10,
            n_trials: 6,
            duration_s: 5.0,
            sample_rate_hz: 2000.0,
            class_gain_matrix,
            band: (20.0, 450.0),
            class_bands: Some(class_bands),
            seed,
        }
    }

    /// Ten movements coded only by channel gains on a geometric grid with
    /// ratio `contrast` between neighbouring levels, all sharing one band.
    pub fn amplitude_coded(seed: u64, contrast: f64) -> Self {
        let mut spec = Self::separable_ten_class(seed);
        let levels = [(0, 3), (1, 2), (2, 1), (3, 0), (0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (2, 0)];
        spec.class_gain_matrix = levels
            .iter()
            .map(|&(a, b)| vec![0.05 * contrast.powi(a), 0.05 * contrast.powi(b)])
            .collect();
        spec.class_bands = None;
        spec
    }

    pub fn validate(&self) -> Result<()> {
        let nyquist = self.sample_rate_hz / 2.0;
        let check_band = |(low, high): (f64, f64)| {
            if low > 0.0 && low < high && high < nyquist {
                Ok(())
            } else {
                Err(Error::InvalidBand {
                    low_hz: low,
                    high_hz: high,
                    sample_rate_hz: self.sample_rate_hz,
                })
            }
        };
        check_band(self.band)?;
        if let Some(bands) = &self.class_bands {
            if bands.len() != self.n_movements || bands.iter().any(|r| r.len() != self.n_channels) {
                return Err(Error::InvalidConfig(format!(
                    "class_bands must be {} x {}",
                    self.n_movements, self.n_channels
                )));
            }
            bands.iter().flatten().copied().try_for_each(check_band)?;
        }
        if self.n_movements > MovementLabel::ALL.len() {
            return Err(Error::InvalidConfig(format!(
                "at most {} movements are supported",
                MovementLabel::ALL.len()
            )));
        }
        if self.n_channels == 0 || !(self.duration_s > 0.0) || self.n_trials == 0 {
            return Err(Error::InvalidConfig(
                "synthetic spec needs channels, trials and a positive duration".into(),
            ));
        }
        if self.class_gain_matrix.len() != self.n_movements
            || self.class_gain_matrix.iter().any(|r| r.len() != self.n_channels)
        {
            return Err(Error::InvalidConfig(format!(
                "class_gain_matrix must be {} x {}",
                self.n_movements, self.n_channels
            )));
        }
        if self
            .class_gain_matrix
            .iter()
            .flatten()
            .any(|g| !(g.is_finite() && *g >= 0.0))
        {
            return Err(Error::InvalidConfig("gains must be finite and non-negative".into()));
        }
        for (i, a) in self.class_gain_matrix.iter().enumerate() {
            if self.class_gain_matrix[i + 1..].iter().any(|b| a == b) {
                return Err(Error::InvalidConfig(format!(
                    "class_gain_matrix row {i} is repeated; classes would be inseparable"
                )));
            }
        }
        Ok(())
    }

    fn band_for(&self, movement: usize, channel: usize) -> (f64, f64) {
        self.class_bands
            .as_ref()
            .map_or(self.band, |bands| bands[movement][channel])
    }
}

/// Unit-variance band-limited noise source for one band.
struct Shaper {
    cascade: Cascade,
    scale: f64,
}

impl Shaper {
    fn new(band: (f64, f64), fs: f64) -> Result<Self> {
        let cascade = butterworth_bandpass(4, band.0, band.1, fs)?;
        let mut impulse = vec![0.0; (4.0 * fs) as usize];
        impulse[0] = 1.0;
        let energy: f64 = cascade.filter(&impulse).iter().map(|h| h * h).sum();
        Ok(Self {
            cascade,
            scale: 1.0 / energy.sqrt(),
        })
    }
}

/// Generate one recording per (subject, movement, trial). Each channel is
/// white Gaussian noise shaped by a 4th-order Butterworth bandpass, scaled
/// to unit expected power and then by the movement's channel gain.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<Recording>> {
    spec.validate()?;
    let fs = spec.sample_rate_hz;
    let n = (spec.duration_s * fs).round() as usize;
    let warmup = (WARMUP_S * fs).round() as usize;
    let shapers = (0..spec.n_movements)
        .map(|m| {
            (0..spec.n_channels)
                .map(|c| Shaper::new(spec.band_for(m, c), fs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for s in 0..spec.n_subjects {
        for m in 0..spec.n_movements {
            for t in 1..=spec.n_trials {
                jobs.push((s, m, t));
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(s, m, t)| {
            let channels = (0..spec.n_channels)
                .map(|c| {
                    let shaper = &shapers[m][c];
                    let seed = derive_seed(spec.seed, "synthetic", &[s as u64, m as u64, u64::from(t), c as u64]);
                    let mut r = rng(seed);
                    let white: Vec<f64> = (0..n + warmup).map(|_| StandardNormal.sample(&mut r)).collect();
                    let gain = spec.class_gain_matrix[m][c] * shaper.scale;
                    shaper.cascade.filter(&white)[warmup..]
                        .iter()
                        .map(|v| v * gain)
                        .collect()
                })
                .collect();
            Recording {
                subject_id: format!("S{}", s + 1),
                movement: MovementLabel::ALL[m],
                trial: t,
                sample_rate_hz: fs,
                units: Units::Volts,
                channels,
            }
        })
        .collect())
}
