//! Time-domain EMG feature catalog and feature-set registry.

pub mod ar;
mod id;
mod sets;
pub mod tdpsd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use id::{FeatureId, MAX_AR_ORDER};
pub use sets::{extract, ChannelCatalog, FeatureSetSpec, FeatureVector, SetName, WindowCatalog};
pub use tdpsd::compute_tdpsd;

/// Floor applied before every logarithm so feature vectors stay finite.
pub const EPS: f64 = 1e-12;

/// Amplitude thresholds of the counting features, in signal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub zc_thresh: f64,
    pub ssc_thresh: f64,
    pub wamp_thresh: f64,
    pub myop_thresh: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            zc_thresh: 1e-4,
            ssc_thresh: 1e-4,
            wamp_thresh: 0.02,
            myop_thresh: 0.016,
        }
    }
}

/// Log-scaled mean absolute value: `ln(sqrt(MAV))`, MAV floored at [`EPS`].
pub fn lmav(x: &[f64]) -> f64 {
    mav(x).max(EPS).sqrt().ln()
}

/// Nonlinear scaled value: log of the RMS deviation between the window's
/// MAV and the cube roots of its sample magnitudes. The mean squared
/// deviation is floored at [`EPS`].
pub fn nsv(x: &[f64]) -> f64 {
    let m = mav(x);
    let msd = x
        .iter()
        .map(|v| {
            let d = m - v.abs().cbrt();
            d * d
        })
        .sum::<f64>()
        / x.len() as f64;
    msd.max(EPS).sqrt().ln()
}

fn mav(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (divisor N).
fn pvar(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

fn hjorth_mobility(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let v = pvar(x);
    if v < EPS {
        return 0.0;
    }
    (pvar(&diff(x)) / v).sqrt()
}

fn skewness(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    if m2 < EPS {
        return 0.0;
    }
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let g1 = m3 / m2.powf(1.5);
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

/// Compute one catalog feature on a single-channel window.
///
/// `ar_order` is the order of the autoregressive model from which `Ar(k)`
/// coefficients are read; it must be at least `k`.
pub fn compute_feature(id: FeatureId, x: &[f64], th: &Thresholds, ar_order: usize) -> Result<f64> {
    use FeatureId::*;
    let needed = id.min_len(ar_order);
    if x.len() < needed {
        return Err(Error::WindowTooShort {
            feature: id,
            needed,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let value = match id {
        Mav => mav(x),
        Iemg => x.iter().map(|v| v.abs()).sum(),
        Wl => x.windows(2).map(|w| (w[1] - w[0]).abs()).sum(),
        Wamp => x
            .windows(2)
            .filter(|w| (w[1] - w[0]).abs() > th.wamp_thresh)
            .count() as f64,
        Zc => x
            .windows(2)
            .filter(|w| w[0] * w[1] < 0.0 && (w[0] - w[1]).abs() >= th.zc_thresh)
            .count() as f64,
        Ssc => x
            .windows(3)
            .filter(|w| (w[1] - w[0]) * (w[1] - w[2]) > th.ssc_thresh)
            .count() as f64,
        Var => {
            let m = mean(x);
            x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
        }
        Rms => (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
        Log => (x.iter().map(|v| (v.abs() + EPS).ln()).sum::<f64>() / n).exp(),
        Damv => x.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (n - 1.0),
        Dasdv => (x.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / (n - 1.0)).sqrt(),
        Myop => x.iter().filter(|v| v.abs() > th.myop_thresh).count() as f64 / n,
        Skw => skewness(x),
        Mob => hjorth_mobility(x),
        Com => {
            let mob = hjorth_mobility(x);
            if mob < EPS {
                0.0
            } else {
                hjorth_mobility(&diff(x)) / mob
            }
        }
        Mfl => x
            .windows(2)
            .map(|w| (w[1] - w[0]).powi(2))
            .sum::<f64>()
            .sqrt()
            .max(EPS)
            .log10(),
        Ar(k) => {
            let k = usize::from(k);
            if k > ar_order {
                return Err(Error::InvalidConfig(format!(
                    "AR{k} requested from an order-{ar_order} model"
                )));
            }
            ar::ar_coefficients(x, ar_order)[k - 1]
        }
        M0 => compute_tdpsd(x)[0],
        M2 => compute_tdpsd(x)[1],
        M4 => compute_tdpsd(x)[2],
        Sparseness => compute_tdpsd(x)[3],
        IrregularityFactor => compute_tdpsd(x)[4],
        WlRatio => compute_tdpsd(x)[5],
        Cov => {
            let m = mean(x);
            let sd = (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt();
            sd / (m.abs() + EPS)
        }
        Tkeo => x.windows(3).map(|w| w[1] * w[1] - w[0] * w[2]).sum::<f64>() / (n - 2.0),
        Lmav => lmav(x),
        Nsv => nsv(x),
    };
    Ok(value)
}
