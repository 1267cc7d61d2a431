//! Learning the per-goal configuration predictor: brute-force labeling of
//! training pages, one-vs-one RBF-SVM training, and leave-one-out
//! cross-validation.

mod multiclass;
mod svm;

pub use multiclass::{
    default_c_grid, default_gamma_grid, grid_search, train_multiclass, MulticlassSvmModel,
    PairwiseMachine, DEFAULT_TOL,
};
pub use svm::{
    kkt_violation, rbf_kernel, smo_solve, smo_train, smo_train_detailed, BinarySvm, SmoSolution,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{oracle_best, CostModelParams, Metric, ProcessorConfig};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, NormalizationTable};

/// The distinct oracle-optimal configurations seen in a training corpus,
/// in first-seen order. Label indices refer to this list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSet {
    pub metric: Metric,
    pub configs: Vec<ProcessorConfig>,
}

impl LabelSet {
    fn from_oracle_configs(metric: Metric, configs: &[ProcessorConfig]) -> (LabelSet, Vec<usize>) {
        let mut distinct: Vec<ProcessorConfig> = Vec::new();
        let labels = configs
            .iter()
            .map(|c| match distinct.iter().position(|d| d == c) {
                Some(i) => i,
                None => {
                    distinct.push(*c);
                    distinct.len() - 1
                }
            })
            .collect();
        (
            LabelSet {
                metric,
                configs: distinct,
            },
            labels,
        )
    }
}

/// One training page: normalized features and its label-set index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub page_id: String,
    pub features: FeatureVector,
    pub label: usize,
}

/// Output of the labeling stage.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub label_set: LabelSet,
    pub normalization: NormalizationTable,
    pub examples: Vec<LabeledExample>,
    /// Oracle optimum per page, in input order.
    pub oracle_configs: Vec<ProcessorConfig>,
}

/// Labels every page with its brute-force optimum for the metric (noise
/// disabled) and normalizes features against this corpus.
pub fn generate_training_data(
    pages: &[(String, FeatureVector)],
    metric: Metric,
    params: &CostModelParams,
) -> Result<TrainingData> {
    if pages.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let oracle_configs: Vec<ProcessorConfig> = pages
        .par_iter()
        .map(|(_, v)| oracle_best(v, metric, params).map(|(c, _)| c))
        .collect::<Result<_>>()?;
    let (label_set, labels) = LabelSet::from_oracle_configs(metric, &oracle_configs);

    let raw: Vec<FeatureVector> = pages.iter().map(|(_, v)| v.clone()).collect();
    let normalization = NormalizationTable::fit(&raw)?;
    let examples = pages
        .iter()
        .zip(&labels)
        .map(|((page_id, v), &label)| {
            Ok(LabeledExample {
                page_id: page_id.clone(),
                features: normalization.normalize(v)?,
                label,
            })
        })
        .collect::<Result<_>>()?;

    Ok(TrainingData {
        label_set,
        normalization,
        examples,
        oracle_configs,
    })
}

/// One held-out prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoocvPrediction {
    pub page_id: String,
    pub predicted: ProcessorConfig,
    pub oracle: ProcessorConfig,
}

/// Leave-one-out outcome: per-page predictions and exact-label accuracy.
#[derive(Debug, Clone)]
pub struct LoocvOutcome {
    pub predictions: Vec<LoocvPrediction>,
    pub accuracy: f64,
}

/// Leave-one-out cross-validation: for each page, a model is trained on
/// the remaining pages (label set and normalization re-fitted per fold)
/// and the held-out page is predicted.
pub fn loocv(
    pages: &[(String, FeatureVector)],
    metric: Metric,
    params: &CostModelParams,
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<LoocvOutcome> {
    if pages.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: pages.len(),
        });
    }
    let oracle_configs: Vec<ProcessorConfig> = pages
        .par_iter()
        .map(|(_, v)| oracle_best(v, metric, params).map(|(c, _)| c))
        .collect::<Result<_>>()?;

    let predictions: Vec<LoocvPrediction> = (0..pages.len())
        .into_par_iter()
        .map(|held_out| {
            let fold_configs: Vec<ProcessorConfig> = oracle_configs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != held_out)
                .map(|(_, c)| *c)
                .collect();
            let (label_set, labels) = LabelSet::from_oracle_configs(metric, &fold_configs);

            let fold_raw: Vec<FeatureVector> = pages
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != held_out)
                .map(|(_, (_, v))| v.clone())
                .collect();
            let normalization = NormalizationTable::fit(&fold_raw)?;
            let examples: Vec<LabeledExample> = fold_raw
                .iter()
                .zip(&labels)
                .enumerate()
                .map(|(j, (v, &label))| {
                    Ok(LabeledExample {
                        page_id: format!("fold{held_out}_{j}"),
                        features: normalization.normalize(v)?,
                        label,
                    })
                })
                .collect::<Result<_>>()?;

            let model = train_multiclass(&examples, &label_set, &normalization, c, gamma, tol)?;
            let predicted = model.predict(&pages[held_out].1)?;
            Ok(LoocvPrediction {
                page_id: pages[held_out].0.clone(),
                predicted,
                oracle: oracle_configs[held_out],
            })
        })
        .collect::<Result<_>>()?;

    let correct = predictions.iter().filter(|p| p.predicted == p.oracle).count();
    Ok(LoocvOutcome {
        accuracy: correct as f64 / predictions.len() as f64,
        predictions,
    })
}
