use rand_distr::{Distribution, Normal};

use super::Recording;
use crate::error::{Error, Result};
use crate::seed::rng;

/// SNR sentinel meaning "do not mix any noise".
pub const NO_MIX: f64 = f64::INFINITY;

/// Add white Gaussian noise to every channel at `snr_db` relative to the
/// channel's measured power (mean square over the whole recording).
///
/// Passing [`NO_MIX`] returns the recording unchanged.
pub fn mix_awgn(rec: &Recording, snr_db: f64, seed: u64) -> Result<Recording> {
    if snr_db == NO_MIX {
        return Ok(rec.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidConfig("SNR is NaN".into()));
    }
    let mut r = rng(seed);
    let mut channels = Vec::with_capacity(rec.n_channels());
    for (c, x) in rec.channels.iter().enumerate() {
        let power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        if !(power > 0.0) {
            return Err(Error::ZeroPowerChannel { channel: c });
        }
        let noise_power = power / 10f64.powf(snr_db / 10.0);
        let normal = Normal::new(0.0, noise_power.sqrt())
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        channels.push(x.iter().map(|v| v + normal.sample(&mut r)).collect());
    }
    Ok(rec.with_channels(channels))
}

/// SNR in dB of an active recording given its RMS and the RMS of the rest
/// (noise-only) state, after subtracting the noise power from the active power.
pub fn estimate_snr(active_rms: f64, noise_rms: f64) -> Result<f64> {
    if !(noise_rms > 0.0 && active_rms > noise_rms) {
        return Err(Error::SignalBelowNoise {
            active_rms,
            noise_rms,
        });
    }
    let signal = (active_rms * active_rms - noise_rms * noise_rms).sqrt();
    Ok(20.0 * (signal / noise_rms).log10())
}
