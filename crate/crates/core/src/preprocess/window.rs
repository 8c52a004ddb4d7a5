use serde::{Deserialize, Serialize};

use crate::dataset::{MovementLabel, Recording};
use crate::error::{Error, Result};

/// Smallest analysis window: a 4th-order AR fit needs headroom above 2k samples.
pub const MIN_WINDOW_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowMeta {
    pub subject: String,
    pub movement: MovementLabel,
    pub trial: u32,
    pub index: usize,
}

/// One analysis segment: `samples[channel][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub samples: Vec<Vec<f64>>,
    pub meta: WindowMeta,
    pub window_ms: f64,
}

impl Window {
    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_channels(&self) -> usize {
        self.samples.len()
    }
}

/// Number of samples in a window of `window_ms` at `sample_rate_hz`.
pub fn window_len(window_ms: f64, sample_rate_hz: f64) -> usize {
    (window_ms / 1000.0 * sample_rate_hz).round() as usize
}

/// Split a recording into windows of `window_ms` advancing by
/// `window_ms - overlap_ms`. A trailing remainder shorter than one window is
/// dropped.
pub fn segment(rec: &Recording, window_ms: f64, overlap_ms: f64) -> Result<Vec<Window>> {
    if !(window_ms > 0.0) || !(overlap_ms >= 0.0 && overlap_ms < window_ms) {
        return Err(Error::InvalidConfig(format!(
            "window {window_ms} ms with overlap {overlap_ms} ms is invalid"
        )));
    }
    let n = window_len(window_ms, rec.sample_rate_hz);
    let step = window_len(window_ms - overlap_ms, rec.sample_rate_hz).max(1);
    if n < MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "window of {n} samples is below the minimum of {MIN_WINDOW_SAMPLES}"
        )));
    }
    let total = rec.n_samples();
    if n > total {
        return Err(Error::WindowLongerThanTrial {
            window: n,
            available: total,
        });
    }
    let count = (total - n) / step + 1;
    Ok((0..count)
        .map(|index| {
            let start = index * step;
            Window {
                samples: rec
                    .channels
                    .iter()
                    .map(|c| c[start..start + n].to_vec())
                    .collect(),
                meta: WindowMeta {
                    subject: rec.subject_id.clone(),
                    movement: rec.movement,
                    trial: rec.trial,
                    index,
                },
                window_ms,
            }
        })
        .collect())
}

/// Drop the first `ms` milliseconds (filter transient) from every channel.
pub fn discard_leading(rec: &Recording, ms: f64) -> Recording {
    let skip = window_len(ms.max(0.0), rec.sample_rate_hz).min(rec.n_samples().saturating_sub(1));
    rec.with_channels(rec.channels.iter().map(|c| c[skip..].to_vec()).collect())
}
