//! Greedy forward feature selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::ModelSpec;
use crate::dataset::Recording;
use crate::error::{Error, Result};
use crate::evaluate::{crossvalidate_prepared, prepare, EvalConfig, MetricName, Prepared};
use crate::features::{FeatureId, FeatureSetSpec, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    MacroF1,
    OvrAccuracy,
}

impl Objective {
    pub fn metric(self) -> MetricName {
        match self {
            Objective::MacroF1 => MetricName::F1,
            Objective::OvrAccuracy => MetricName::OvrAccuracy,
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "macro_f1" | "f1" => Ok(Objective::MacroF1),
            "ovr_accuracy" => Ok(Objective::OvrAccuracy),
            other => Err(Error::InvalidConfig(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub pool: Vec<FeatureId>,
    /// Minimum gain, in percentage points of the objective, to accept a feature.
    pub improvement_threshold: f64,
    pub objective: Objective,
    pub model: ModelSpec,
    pub eval: EvalConfig,
    pub thresholds: Thresholds,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            pool: FeatureId::catalog(),
            improvement_threshold: 0.25,
            objective: Objective::MacroF1,
            model: ModelSpec::default(),
            eval: EvalConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pool.is_empty() {
            return Err(Error::InvalidConfig("selection pool is empty".into()));
        }
        if !(self.improvement_threshold > 0.0) {
            return Err(Error::InvalidConfig("improvement threshold must be positive".into()));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub feature: FeatureId,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub candidate: FeatureId,
    pub score_before: f64,
    pub score_after: f64,
    pub accepted: bool,
    /// Every candidate tried at this step, in pool order.
    pub candidates: Vec<CandidateScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub objective: Objective,
    pub improvement_threshold: f64,
    pub steps: Vec<SelectionStep>,
    pub selected: Vec<FeatureId>,
}

impl SelectionTrace {
    /// Plain-text table of the steps.
    pub fn table(&self) -> String {
        let mut out = format!("{:>4}  {:<20} {:>10} {:>10}  {}\n", "step", "candidate", "before", "after", "accepted");
        for (i, s) in self.steps.iter().enumerate() {
            out += &format!(
                "{:>4}  {:<20} {:>10.4} {:>10.4}  {}\n",
                i + 1,
                s.candidate.name(),
                s.score_before,
                s.score_after,
                if s.accepted { "yes" } else { "no" }
            );
        }
        out += &format!(
            "selected: {}\n",
            self.selected.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
        );
        out
    }
}

/// Objective of a feature list in percentage points (mean over all folds).
fn score(prepared: &Prepared, features: Vec<FeatureId>, cfg: &SelectionConfig) -> Result<f64> {
    let set = FeatureSetSpec::custom(features, None)?.with_thresholds(cfg.thresholds);
    let report = crossvalidate_prepared(prepared, &set, &cfg.model)?;
    if let Some(e) = report.errors.first() {
        return Err(Error::InvalidConfig(format!(
            "evaluation of {} failed on subject {} fold {}: {}",
            set.display_name(),
            e.subject,
            e.fold,
            e.message
        )));
    }
    Ok(100.0 * report.mean(cfg.objective.metric()))
}

/// Forward selection: start from the best single feature, then add the
/// best remaining candidate while it improves the objective by at least
/// the threshold. Ties go to the earlier pool entry.
pub fn forward_select(dataset: &[Recording], cfg: &SelectionConfig) -> Result<SelectionTrace> {
    cfg.validate()?;
    let prepared = prepare(dataset, &cfg.eval, &cfg.thresholds)?;
    let mut remaining: Vec<FeatureId> = cfg.pool.clone();
    let mut selected: Vec<FeatureId> = Vec::new();
    let mut steps = Vec::new();
    let mut current = 0.0;

    while !remaining.is_empty() {
        let scores: Vec<f64> = remaining
            .par_iter()
            .map(|&f| {
                let mut features = selected.clone();
                features.push(f);
                score(&prepared, features, cfg)
            })
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        let candidate = remaining[best];
        let first = selected.is_empty();
        let accepted = first || scores[best] - current >= cfg.improvement_threshold;
        steps.push(SelectionStep {
            candidate,
            score_before: current,
            score_after: scores[best],
            accepted,
            candidates: remaining
                .iter()
                .zip(&scores)
                .map(|(&feature, &score)| CandidateScore { feature, score })
                .collect(),
        });
        log::info!("{} -> {:.4} ({})", candidate.name(), scores[best], if accepted { "accepted" } else { "rejected" });
        if !accepted {
            break;
        }
        current = scores[best];
        selected.push(candidate);
        remaining.remove(best);
    }

    Ok(SelectionTrace {
        objective: cfg.objective,
        improvement_threshold: cfg.improvement_threshold,
        steps,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticSpec};

    fn data() -> Vec<Recording> {
        let mut spec = SyntheticSpec::amplitude_coded(11, 2.0);
        spec.n_movements = 4;
        spec.n_trials = 3;
        spec.duration_s = 1.0;
        spec.class_gain_matrix.truncate(4);
        generate_synthetic(&spec).unwrap()
    }

    #[test]
    fn single_feature_pool() {
        let cfg = SelectionConfig { pool: vec![FeatureId::Zc], ..SelectionConfig::default() };
        let t = forward_select(&data(), &cfg).unwrap();
        assert_eq!(t.selected, vec![FeatureId::Zc]);
        assert_eq!(t.steps.len(), 1);
    }

    #[test]
    fn huge_threshold_keeps_one() {
        let cfg = SelectionConfig {
            pool: vec![FeatureId::Zc, FeatureId::Mav, FeatureId::Ssc, FeatureId::Wl],
            improvement_threshold: 100.0,
            ..SelectionConfig::default()
        };
        let t = forward_select(&data(), &cfg).unwrap();
        assert_eq!(t.selected.len(), 1);
        assert_eq!(t.steps.len(), 2);
        assert!(!t.steps[1].accepted);
    }

    #[test]
    fn accepted_steps_improve() {
        let cfg = SelectionConfig {
            pool: vec![FeatureId::Zc, FeatureId::Ssc, FeatureId::Mav, FeatureId::Skw, FeatureId::Mav],
            ..SelectionConfig::default()
        };
        let t = forward_select(&data(), &cfg).unwrap();
        let accepted: Vec<&SelectionStep> = t.steps.iter().filter(|s| s.accepted).collect();
        for w in accepted.windows(2) {
            assert!(w[1].score_after - w[0].score_after >= cfg.improvement_threshold);
        }
        assert!(t.selected.iter().filter(|&&f| f == FeatureId::Mav).count() <= 1);
    }

    #[test]
    fn config_validation() {
        assert!(SelectionConfig { pool: vec![], ..SelectionConfig::default() }.validate().is_err());
        assert!(SelectionConfig { improvement_threshold: 0.0, ..SelectionConfig::default() }.validate().is_err());
    }
}
