//! One-vs-one multiclass decomposition over the label set, majority vote
//! with lowest-index tie-break, plus hyperparameter grid search.

use serde::{Deserialize, Serialize};

use crate::device::Metric;
use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureVector, NormalizationTable};

use super::svm::{smo_train, BinarySvm};
use super::{LabelSet, LabeledExample};

/// Default SMO stopping tolerance.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Default hyperparameter grids; gamma is scaled by the feature count.
pub fn default_c_grid() -> Vec<f64> {
    vec![0.1, 1.0, 10.0, 100.0]
}

pub fn default_gamma_grid() -> Vec<f64> {
    [0.01, 0.1, 1.0, 10.0]
        .iter()
        .map(|g| g / crate::features::FEATURE_COUNT as f64)
        .collect()
}

/// One pairwise machine: votes for `label_a` on positive decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMachine {
    pub label_a: usize,
    pub label_b: usize,
    pub svm: BinarySvm,
}

/// The trained per-goal predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassSvmModel {
    pub schema_version: u32,
    pub metric: Metric,
    pub label_set: LabelSet,
    pub normalization: NormalizationTable,
    pub machines: Vec<PairwiseMachine>,
    /// Predicted when no machine exists (single-label training data).
    pub default_label: usize,
}

impl MulticlassSvmModel {
    /// Majority vote over the pairwise machines; ties break toward the
    /// lowest label index. Input must be normalized.
    pub fn predict_normalized(&self, x: &[f64]) -> Result<usize> {
        if self.machines.is_empty() {
            return Ok(self.default_label);
        }
        let mut votes = vec![0usize; self.label_set.configs.len()];
        for machine in &self.machines {
            let vote = if machine.svm.predict(x)? {
                machine.label_a
            } else {
                machine.label_b
            };
            votes[vote] += 1;
        }
        let mut best = 0;
        for (label, &count) in votes.iter().enumerate() {
            if count > votes[best] {
                best = label;
            }
        }
        Ok(best)
    }

    /// Predicts the configuration for a raw feature vector, normalizing
    /// (with clamping) through the model's table first.
    pub fn predict(&self, raw: &FeatureVector) -> Result<crate::device::ProcessorConfig> {
        let schema = FeatureSchema::standard();
        schema.check_version(self.schema_version)?;
        let normalized = self.normalization.normalize(raw)?;
        let label = self.predict_normalized(&normalized.values)?;
        Ok(self.label_set.configs[label])
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<MulticlassSvmModel> {
        let raw = std::fs::read(path)?;
        let model: MulticlassSvmModel = serde_json::from_slice(&raw)?;
        FeatureSchema::standard().check_version(model.schema_version)?;
        Ok(model)
    }
}

/// Trains one-vs-one machines over every label pair present in the data.
/// Labels with no examples are dropped from pairing; if a single label
/// remains the model is a constant predictor.
pub fn train_multiclass(
    examples: &[LabeledExample],
    label_set: &LabelSet,
    normalization: &NormalizationTable,
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<MulticlassSvmModel> {
    if examples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let k = label_set.configs.len();
    let mut by_label: Vec<Vec<&LabeledExample>> = vec![Vec::new(); k];
    for example in examples {
        by_label[example.label].push(example);
    }
    let present: Vec<usize> = (0..k).filter(|&l| !by_label[l].is_empty()).collect();
    let default_label = present[0];

    let mut machines = Vec::new();
    for (ai, &a) in present.iter().enumerate() {
        for &b in &present[ai + 1..] {
            let mut xs: Vec<Vec<f64>> = Vec::with_capacity(by_label[a].len() + by_label[b].len());
            let mut ys: Vec<f64> = Vec::with_capacity(xs.capacity());
            for e in &by_label[a] {
                xs.push(e.features.values.clone());
                ys.push(1.0);
            }
            for e in &by_label[b] {
                xs.push(e.features.values.clone());
                ys.push(-1.0);
            }
            let svm = smo_train(&xs, &ys, c, gamma, tol)?;
            machines.push(PairwiseMachine {
                label_a: a,
                label_b: b,
                svm,
            });
        }
    }

    Ok(MulticlassSvmModel {
        schema_version: FeatureSchema::standard().version(),
        metric: label_set.metric,
        label_set: label_set.clone(),
        normalization: normalization.clone(),
        machines,
        default_label,
    })
}

/// Stratified k-fold accuracy over the (C, gamma) grid; picks the highest
/// mean accuracy, breaking ties toward smaller C then smaller gamma.
pub fn grid_search(
    examples: &[LabeledExample],
    label_set: &LabelSet,
    normalization: &NormalizationTable,
    c_grid: &[f64],
    gamma_grid: &[f64],
    folds: usize,
) -> Result<(f64, f64)> {
    if examples.len() < folds {
        return Err(Error::TooFewSamples {
            needed: folds,
            got: examples.len(),
        });
    }
    if c_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }

    // stratified assignment: the j-th example of each label goes to fold j % folds
    let mut fold_of = vec![0usize; examples.len()];
    let mut seen = vec![0usize; label_set.configs.len()];
    for (i, example) in examples.iter().enumerate() {
        fold_of[i] = seen[example.label] % folds;
        seen[example.label] += 1;
    }

    let mut best: Option<(f64, (f64, f64))> = None;
    for &c in c_grid {
        for &gamma in gamma_grid {
            let mut correct = 0usize;
            for fold in 0..folds {
                let train: Vec<LabeledExample> = examples
                    .iter()
                    .zip(&fold_of)
                    .filter(|(_, &f)| f != fold)
                    .map(|(e, _)| e.clone())
                    .collect();
                if train.is_empty() {
                    continue;
                }
                let model =
                    train_multiclass(&train, label_set, normalization, c, gamma, DEFAULT_TOL)?;
                for (example, _) in examples.iter().zip(&fold_of).filter(|(_, &f)| f == fold) {
                    if model.predict_normalized(&example.features.values)? == example.label {
                        correct += 1;
                    }
                }
            }
            let accuracy = correct as f64 / examples.len() as f64;
            // strict > keeps the first (smallest C, then gamma) on ties
            if best.is_none() || accuracy > best.as_ref().expect("some").0 {
                best = Some((accuracy, (c, gamma)));
            }
        }
    }
    Ok(best.expect("non-empty grid").1)
}
