//! IIR filter design and causal filtering.
//!
//! The bandpass is a Butterworth design obtained from the analog lowpass
//! prototype through the lowpass-to-bandpass transform and the bilinear
//! transform with frequency prewarping. It is realized as a cascade of
//! second-order sections. The notch is a single constant-Q biquad.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dataset::Recording;
use crate::error::{Error, Result};

/// Digital filter configuration applied to every channel before windowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSpec {
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// Mains frequency to reject; `None` disables the notch.
    pub notch_hz: Option<f64>,
    pub notch_q: f64,
    /// Order of the Butterworth lowpass prototype. The bandpass has twice
    /// this order and `order` second-order sections.
    pub order: usize,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            band_low_hz: 20.0,
            band_high_hz: 500.0,
            notch_hz: Some(50.0),
            notch_q: 30.0,
            order: 4,
        }
    }
}

impl FilterSpec {
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if !(sample_rate_hz > 2.0 * self.band_high_hz) {
            return Err(Error::NyquistViolation {
                sample_rate_hz,
                band_high_hz: self.band_high_hz,
            });
        }
        if !(self.band_low_hz > 0.0 && self.band_low_hz < self.band_high_hz) {
            return Err(Error::InvalidBand {
                low_hz: self.band_low_hz,
                high_hz: self.band_high_hz,
                sample_rate_hz,
            });
        }
        if self.order == 0 {
            return Err(Error::InvalidConfig("filter order must be at least 1".into()));
        }
        if let Some(f) = self.notch_hz {
            if !(f > self.band_low_hz && f < self.band_high_hz) {
                return Err(Error::InvalidConfig(format!(
                    "notch frequency {f} Hz lies outside the passband"
                )));
            }
            if !(self.notch_q > 0.0) {
                return Err(Error::InvalidConfig("notch Q must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Second-order section with `a[0]` normalized to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    /// Constant-Q notch (two zeros on the unit circle at `freq_hz`).
    pub fn notch(freq_hz: f64, q: f64, sample_rate_hz: f64) -> Self {
        let w0 = 2.0 * PI * freq_hz / sample_rate_hz;
        let alpha = w0.sin() / (2.0 * q);
        let cw = w0.cos();
        let a0 = 1.0 + alpha;
        Self {
            b: [1.0 / a0, -2.0 * cw / a0, 1.0 / a0],
            a: [1.0, -2.0 * cw / a0, (1.0 - alpha) / a0],
        }
    }

    /// Complex frequency response at normalized angular frequency `w` (rad/sample).
    pub fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        let num = self.b[0] + self.b[1] * z1 + self.b[2] * z2;
        let den = self.a[0] + self.a[1] * z1 + self.a[2] * z2;
        num / den
    }
}

/// A chain of biquads applied in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cascade {
    pub sections: Vec<Biquad>,
}

impl Cascade {
    pub fn response(&self, w: f64) -> Complex64 {
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(w))
    }

    /// Magnitude response at `freq_hz`.
    pub fn gain_at(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        self.response(2.0 * PI * freq_hz / sample_rate_hz).norm()
    }

    /// Causal single-pass filtering (transposed direct form II, zero initial state).
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b[0] * input + z1;
                z1 = s.b[1] * input - s.a[1] * out + z2;
                z2 = s.b[2] * input - s.a[2] * out;
                *v = out;
            }
        }
        y
    }
}

/// Butterworth bandpass with a prototype of order `order`, as `order` biquads.
pub fn butterworth_bandpass(
    order: usize,
    low_hz: f64,
    high_hz: f64,
    sample_rate_hz: f64,
) -> Result<Cascade> {
    let nyquist = sample_rate_hz / 2.0;
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist) {
        return Err(Error::InvalidBand {
            low_hz,
            high_hz,
            sample_rate_hz,
        });
    }
    if order == 0 {
        return Err(Error::InvalidConfig("filter order must be at least 1".into()));
    }
    let fs2 = 2.0 * sample_rate_hz;
    let wl = fs2 * (PI * low_hz / sample_rate_hz).tan();
    let wh = fs2 * (PI * high_hz / sample_rate_hz).tan();
    let w0 = (wl * wh).sqrt();
    let bw = wh - wl;

    let mut upper = Vec::new();
    let mut real = Vec::new();
    for k in 0..order {
        let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
        let p = Complex64::from_polar(1.0, theta);
        let half = p * (bw / 2.0);
        let root = (half * half - w0 * w0).sqrt();
        for s in [half + root, half - root] {
            let z = (fs2 + s) / (fs2 - s);
            if z.im.abs() <= 1e-12 * z.norm().max(1.0) {
                real.push(z.re);
            } else if z.im > 0.0 {
                upper.push(z);
            }
        }
    }
    real.sort_by(|a, b| a.total_cmp(b));

    let mut sections: Vec<Biquad> = upper
        .iter()
        .map(|z| Biquad {
            b: [1.0, 0.0, -1.0],
            a: [1.0, -2.0 * z.re, z.norm_sqr()],
        })
        .collect();
    for pair in real.chunks(2) {
        let (r1, r2) = (pair[0], *pair.get(1).unwrap_or(&0.0));
        sections.push(Biquad {
            b: [1.0, 0.0, -1.0],
            a: [1.0, -(r1 + r2), r1 * r2],
        });
    }
    debug_assert_eq!(sections.len(), order);

    let mut cascade = Cascade { sections };
    let w_center = 2.0 * (w0 / fs2).atan();
    let g = cascade.response(w_center).norm();
    let per_section = g.powf(-1.0 / order as f64);
    for s in &mut cascade.sections {
        for b in &mut s.b {
            *b *= per_section;
        }
    }
    Ok(cascade)
}

/// Bandpass followed by the optional notch, designed for one sample rate.
pub fn design(spec: &FilterSpec, sample_rate_hz: f64) -> Result<Cascade> {
    spec.validate(sample_rate_hz)?;
    let mut cascade =
        butterworth_bandpass(spec.order, spec.band_low_hz, spec.band_high_hz, sample_rate_hz)?;
    if let Some(f) = spec.notch_hz {
        cascade
            .sections
            .push(Biquad::notch(f, spec.notch_q, sample_rate_hz));
    }
    Ok(cascade)
}

/// Filter every channel of `rec` causally. Output length equals input length.
pub fn apply_filters(rec: &Recording, spec: &FilterSpec) -> Result<Recording> {
    let cascade = design(spec, rec.sample_rate_hz)?;
    let channels = rec.channels.iter().map(|c| cascade.filter(c)).collect();
    Ok(rec.with_channels(channels))
}
