//! Named feature sets and per-window extraction.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ar, compute_feature, compute_tdpsd, FeatureId, Thresholds, MAX_AR_ORDER};
use crate::error::{Error, Result};
use crate::preprocess::{Window, WindowMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SetName {
    Fs1,
    Fs2,
    Fs3,
    Fs4,
    Proposed,
    Custom,
}

impl SetName {
    pub const REGISTRY: [SetName; 5] = [
        SetName::Fs1,
        SetName::Fs2,
        SetName::Fs3,
        SetName::Fs4,
        SetName::Proposed,
    ];

    /// Registered feature list; `None` for `Custom`.
    pub fn features(self) -> Option<Vec<FeatureId>> {
        use FeatureId::*;
        Some(match self {
            SetName::Fs1 => [Rms].into_iter().chain((1..=6).map(Ar)).collect(),
            SetName::Fs2 => vec![Iemg, Wl, Wamp, Zc, Ssc, Var],
            SetName::Fs3 => vec![M0, M2, M4, Sparseness, IrregularityFactor, WlRatio],
            SetName::Fs4 => vec![M0, M2, M4, IrregularityFactor, Sparseness, Cov, Tkeo],
            SetName::Proposed => [Lmav, Nsv, Wl, Wamp, Ssc, Zc, Mob, Com, Skw]
                .into_iter()
                .chain((1..=4).map(Ar))
                .collect(),
            SetName::Custom => return None,
        })
    }
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetName::Fs1 => "FS1",
            SetName::Fs2 => "FS2",
            SetName::Fs3 => "FS3",
            SetName::Fs4 => "FS4",
            SetName::Proposed => "PROPOSED",
            SetName::Custom => "CUSTOM",
        })
    }
}

impl std::str::FromStr for SetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FS1" => Ok(SetName::Fs1),
            "FS2" => Ok(SetName::Fs2),
            "FS3" => Ok(SetName::Fs3),
            "FS4" => Ok(SetName::Fs4),
            "PROPOSED" => Ok(SetName::Proposed),
            "CUSTOM" => Ok(SetName::Custom),
            other => Err(Error::InvalidConfig(format!("unknown feature set {other:?}"))),
        }
    }
}

/// An ordered list of per-channel features plus the thresholds they use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSetSpec")]
pub struct FeatureSetSpec {
    pub name: SetName,
    /// Display label for custom sets, e.g. `FS2+LMAV+NSV`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub features: Vec<FeatureId>,
    pub thresholds: Thresholds,
}

#[derive(Deserialize)]
struct RawSetSpec {
    name: SetName,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    features: Option<Vec<FeatureId>>,
    #[serde(default)]
    thresholds: Thresholds,
}

impl TryFrom<RawSetSpec> for FeatureSetSpec {
    type Error = Error;

    fn try_from(raw: RawSetSpec) -> Result<Self> {
        let features = match (raw.name.features(), raw.features) {
            (Some(registered), None) => registered,
            (Some(registered), Some(given)) if given == registered => registered,
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(format!(
                    "{} has a fixed feature list; use CUSTOM to change it",
                    raw.name
                )))
            }
            (None, Some(given)) => given,
            (None, None) => {
                return Err(Error::InvalidConfig("CUSTOM sets need a feature list".into()))
            }
        };
        let spec = FeatureSetSpec {
            name: raw.name,
            label: raw.label,
            features,
            thresholds: raw.thresholds,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl FeatureSetSpec {
    pub fn named(name: SetName) -> Result<Self> {
        let features = name
            .features()
            .ok_or_else(|| Error::InvalidConfig("CUSTOM sets need a feature list".into()))?;
        Ok(Self {
            name,
            label: None,
            features,
            thresholds: Thresholds::default(),
        })
    }

    pub fn custom(features: Vec<FeatureId>, label: Option<String>) -> Result<Self> {
        let spec = Self {
            name: SetName::Custom,
            label,
            features,
            thresholds: Thresholds::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A registered set with extra features appended, e.g. `FS1 + LMAV + NSV`.
    pub fn augmented(base: SetName, extra: &[FeatureId]) -> Result<Self> {
        let base_spec = Self::named(base)?;
        let label = std::iter::once(base.to_string())
            .chain(extra.iter().map(|f| f.name()))
            .collect::<Vec<_>>()
            .join("+");
        let mut features = base_spec.features;
        features.extend_from_slice(extra);
        Self::custom(features, Some(label))
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidConfig("feature set is empty".into()));
        }
        Ok(())
    }

    pub fn display_name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.to_string())
    }

    /// Order of the AR model used for this set: its highest AR lag.
    pub fn ar_order(&self) -> usize {
        self.features
            .iter()
            .filter_map(|f| match f {
                FeatureId::Ar(k) => Some(usize::from(*k)),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn len_per_channel(&self) -> usize {
        self.features.len()
    }

    /// Column names in channel-major order, e.g. `LMAV_ch1`.
    pub fn column_names(&self, n_channels: usize) -> Vec<String> {
        (1..=n_channels)
            .flat_map(|c| self.features.iter().map(move |f| format!("{f}_ch{c}")))
            .collect()
    }

    /// Extract the set from every channel of a window (channel-major).
    pub fn extract(&self, window: &Window) -> Result<FeatureVector> {
        let order = self.ar_order();
        let mut values = Vec::with_capacity(self.features.len() * window.n_channels());
        for x in &window.samples {
            let mut ar_cache: Option<Vec<f64>> = None;
            for &f in &self.features {
                let v = match f {
                    FeatureId::Ar(k) if x.len() >= f.min_len(order) => {
                        let coeffs = ar_cache.get_or_insert_with(|| ar::ar_coefficients(x, order));
                        coeffs[usize::from(k) - 1]
                    }
                    _ => compute_feature(f, x, &self.thresholds, order)?,
                };
                values.push(v);
            }
        }
        Ok(FeatureVector {
            values,
            meta: window.meta.clone(),
            set_name: self.display_name(),
        })
    }

    /// Assemble this set from a precomputed catalog.
    pub fn gather(&self, catalog: &WindowCatalog) -> Result<Vec<f64>> {
        let order = self.ar_order();
        let mut values = Vec::with_capacity(self.features.len() * catalog.channels.len());
        for ch in &catalog.channels {
            if ch.thresholds != self.thresholds {
                return Err(Error::InvalidConfig(
                    "catalog was computed with different thresholds".into(),
                ));
            }
            for &f in &self.features {
                values.push(ch.get(f, order)?);
            }
        }
        Ok(values)
    }
}

/// One extracted feature vector with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub meta: WindowMeta,
    pub set_name: String,
}

/// Extract `set` from `window`.
pub fn extract(set: &FeatureSetSpec, window: &Window) -> Result<FeatureVector> {
    set.extract(window)
}

const N_SCALAR: usize = 26;

fn slot(id: FeatureId) -> Option<usize> {
    use FeatureId::*;
    Some(match id {
        Mav => 0,
        Iemg => 1,
        Wl => 2,
        Wamp => 3,
        Zc => 4,
        Ssc => 5,
        Var => 6,
        Rms => 7,
        Log => 8,
        Damv => 9,
        Dasdv => 10,
        Myop => 11,
        Skw => 12,
        Mob => 13,
        Com => 14,
        Mfl => 15,
        M0 => 16,
        M2 => 17,
        M4 => 18,
        Sparseness => 19,
        IrregularityFactor => 20,
        WlRatio => 21,
        Cov => 22,
        Tkeo => 23,
        Lmav => 24,
        Nsv => 25,
        Ar(_) => return None,
    })
}

/// Every catalog feature of one channel, including the AR models of all
/// orders the window length allows.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCatalog {
    scalars: [f64; N_SCALAR],
    /// `ar_models[p - 1]` = coefficients of the order-`p` model.
    ar_models: Vec<Vec<f64>>,
    len: usize,
    thresholds: Thresholds,
}

impl ChannelCatalog {
    pub fn compute(x: &[f64], th: &Thresholds) -> Result<Self> {
        let mut scalars = [0.0; N_SCALAR];
        let tdpsd = if x.len() >= 5 { Some(compute_tdpsd(x)) } else { None };
        for id in FeatureId::catalog() {
            let Some(s) = slot(id) else { continue };
            scalars[s] = match (id, tdpsd) {
                (FeatureId::M0, Some(t)) => t[0],
                (FeatureId::M2, Some(t)) => t[1],
                (FeatureId::M4, Some(t)) => t[2],
                (FeatureId::Sparseness, Some(t)) => t[3],
                (FeatureId::IrregularityFactor, Some(t)) => t[4],
                (FeatureId::WlRatio, Some(t)) => t[5],
                _ => compute_feature(id, x, th, 1)?,
            };
        }
        let max_order = MAX_AR_ORDER.min(x.len().saturating_sub(1) / 2);
        let ar_models = if max_order > 0 {
            ar::levinson_durbin(&ar::autocorrelation(x, max_order), max_order)
        } else {
            Vec::new()
        };
        Ok(Self {
            scalars,
            ar_models,
            len: x.len(),
            thresholds: *th,
        })
    }

    pub fn get(&self, id: FeatureId, ar_order: usize) -> Result<f64> {
        match id {
            FeatureId::Ar(k) => {
                let k = usize::from(k);
                if k > ar_order {
                    return Err(Error::InvalidConfig(format!(
                        "AR{k} requested from an order-{ar_order} model"
                    )));
                }
                self.ar_models
                    .get(ar_order - 1)
                    .map(|m| m[k - 1])
                    .ok_or(Error::WindowTooShort {
                        feature: id,
                        needed: id.min_len(ar_order),
                        got: self.len,
                    })
            }
            _ => Ok(self.scalars[slot(id).expect("non-AR feature")]),
        }
    }
}

/// Catalog of every channel of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCatalog {
    pub channels: Vec<ChannelCatalog>,
    pub meta: WindowMeta,
}

impl WindowCatalog {
    pub fn compute(window: &Window, th: &Thresholds) -> Result<Self> {
        Ok(Self {
            channels: window
                .samples
                .iter()
                .map(|x| ChannelCatalog::compute(x, th))
                .collect::<Result<_>>()?,
            meta: window.meta.clone(),
        })
    }
}
