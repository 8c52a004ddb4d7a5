//! Time-dependent power spectrum descriptors computed per channel.

use super::EPS;

const POWER_NORM: f64 = 0.1;

/// `[M0, M2, M4, SPARSENESS, IRREGULARITY_FACTOR, WL_RATIO]` of one channel.
///
/// Root-squared moments come from the signal and its first and second
/// differences (by Parseval these are the zero, second and fourth spectral
/// moments). All ratios with a zero denominator evaluate to 0 so every value
/// stays at or above `ln(EPS)`.
pub fn compute_tdpsd(x: &[f64]) -> [f64; 6] {
    let d1: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d2: Vec<f64> = d1.windows(2).map(|w| w[1] - w[0]).collect();
    let root_sq = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let (m0, m2, m4) = (root_sq(x), root_sq(&d1), root_sq(&d2));
    let norm = |m: f64| m.powf(POWER_NORM) / POWER_NORM;
    let (p0, p2, p4) = (norm(m0), norm(m2), norm(m4));
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };

    let abs_sum = |v: &[f64]| v.iter().map(|a| a.abs()).sum::<f64>();
    [
        (p0 + EPS).ln(),
        ((p0 - p2).abs() + EPS).ln(),
        ((p0 - p4).abs() + EPS).ln(),
        (ratio(m0, ((m0 - m2).abs() * (m0 - m4).abs()).sqrt()) + EPS).ln(),
        (ratio(m2, (m0 * m4).sqrt()) + EPS).ln(),
        (abs_sum(&d1) / (abs_sum(&d2) + EPS) + EPS).ln(),
    ]
}
