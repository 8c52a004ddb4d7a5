use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Highest autoregressive lag in the catalog.
pub const MAX_AR_ORDER: usize = 6;

/// One scalar per-channel feature of the time-domain catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureId {
    Mav,
    Iemg,
    Wl,
    Wamp,
    Zc,
    Ssc,
    Var,
    Rms,
    Log,
    Damv,
    Dasdv,
    Myop,
    Skw,
    Mob,
    Com,
    Mfl,
    /// k-th coefficient (1-based) of the Yule–Walker AR model.
    Ar(u8),
    M0,
    M2,
    M4,
    IrregularityFactor,
    Sparseness,
    WlRatio,
    Cov,
    Tkeo,
    Lmav,
    Nsv,
}

impl FeatureId {
    /// The full catalog in canonical order (32 entries, AR lags counted individually).
    pub fn catalog() -> Vec<FeatureId> {
        use FeatureId::*;
        let mut v = vec![
            Mav, Iemg, Wl, Wamp, Zc, Ssc, Var, Rms, Log, Damv, Dasdv, Myop, Skw, Mob, Com, Mfl,
        ];
        v.extend((1..=MAX_AR_ORDER as u8).map(Ar));
        v.extend([M0, M2, M4, IrregularityFactor, Sparseness, WlRatio, Cov, Tkeo, Lmav, Nsv]);
        v
    }

    pub fn name(self) -> String {
        use FeatureId::*;
        let s = match self {
            Mav => "MAV",
            Iemg => "IEMG",
            Wl => "WL",
            Wamp => "WAMP",
            Zc => "ZC",
            Ssc => "SSC",
            Var => "VAR",
            Rms => "RMS",
            Log => "LOG",
            Damv => "DAMV",
            Dasdv => "DASDV",
            Myop => "MYOP",
            Skw => "SKW",
            Mob => "MOB",
            Com => "COM",
            Mfl => "MFL",
            Ar(k) => return format!("AR{k}"),
            M0 => "M0",
            M2 => "M2",
            M4 => "M4",
            IrregularityFactor => "IRREGULARITY_FACTOR",
            Sparseness => "SPARSENESS",
            WlRatio => "WL_RATIO",
            Cov => "COV",
            Tkeo => "TKEO",
            Lmav => "LMAV",
            Nsv => "NSV",
        };
        s.to_string()
    }

    /// Minimum window length for which the feature is defined, given the AR
    /// model order used for `Ar` features.
    pub fn min_len(self, ar_order: usize) -> usize {
        use FeatureId::*;
        match self {
            Ar(_) => 2 * ar_order + 1,
            M0 | M2 | M4 | IrregularityFactor | Sparseness | WlRatio => 5,
            Wl | Wamp | Zc | Ssc | Damv | Dasdv | Mob | Com | Mfl | Tkeo | Skw => 3,
            Var | Cov => 2,
            Mav | Iemg | Rms | Log | Myop | Lmav | Nsv => 1,
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for FeatureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().to_ascii_uppercase();
        let lag = t
            .strip_prefix("AR")
            .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
            .filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()));
        if let Some(r) = lag {
            let k: u8 = r
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad AR lag in {s:?}")))?;
            if k == 0 || k as usize > MAX_AR_ORDER {
                return Err(Error::InvalidConfig(format!(
                    "AR lag must be in 1..={MAX_AR_ORDER}, got {k}"
                )));
            }
            return Ok(FeatureId::Ar(k));
        }
        FeatureId::catalog()
            .into_iter()
            .find(|id| id.name() == t)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown feature {s:?}")))
    }
}

impl Serialize for FeatureId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for FeatureId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
