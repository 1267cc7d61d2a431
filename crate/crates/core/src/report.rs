//! Evaluation reports: per-page rows, repetition protocol under noise, and
//! aggregate statistics against the oracle and HMP baselines.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{
    evaluate_rep, hmp_baseline, oracle_best, CostModelParams, Metric, ProcessorConfig,
};
use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureVector};
use crate::learn::{
    generate_training_data, grid_search, loocv, train_multiclass, LoocvPrediction, DEFAULT_TOL,
};
use crate::stats::{geometric_ci95, geometric_mean};

/// Repetition cap for the confidence-interval protocol.
pub const MAX_REPETITIONS: u32 = 50;
/// CI width must fall below this fraction of the mean.
pub const CI_WIDTH_FRACTION: f64 = 0.05;

/// A value measured under the repetition protocol: the geometric mean of
/// its repetitions, how many were needed, and whether the 95% CI width
/// criterion was met within the cap.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub value: f64,
    pub repetitions: u32,
    pub ci_met: bool,
}

/// Measures one (page, config) metric. Noise off: a single deterministic
/// evaluation. Noise on: repeat until the 95% CI width is below 5% of the
/// mean, at most [`MAX_REPETITIONS`] times, and report the geometric mean.
pub fn measure_with_ci(
    v: &FeatureVector,
    config: &ProcessorConfig,
    params: &CostModelParams,
    metric: Metric,
) -> Result<MeasuredValue> {
    if params.noise_sigma == 0.0 {
        let value = evaluate_rep(v, config, params, 0)?.metric(metric);
        return Ok(MeasuredValue {
            value,
            repetitions: 1,
            ci_met: true,
        });
    }
    let mut samples = Vec::with_capacity(8);
    for rep in 0..MAX_REPETITIONS {
        samples.push(evaluate_rep(v, config, params, rep)?.metric(metric));
        if samples.len() >= 3 {
            let (lo, hi) = geometric_ci95(&samples);
            let mean = geometric_mean(&samples);
            if hi - lo < CI_WIDTH_FRACTION * mean {
                return Ok(MeasuredValue {
                    value: mean,
                    repetitions: rep + 1,
                    ci_met: true,
                });
            }
        }
    }
    Ok(MeasuredValue {
        value: geometric_mean(&samples),
        repetitions: MAX_REPETITIONS,
        ci_met: false,
    })
}

/// One evaluated page.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PageRow {
    pub page_id: String,
    pub predicted: ProcessorConfig,
    pub oracle: ProcessorConfig,
    /// Measured metric of the predicted configuration.
    pub predicted_value: MeasuredValue,
    /// Measured metric of the HMP baseline.
    pub hmp_value: MeasuredValue,
    /// Noise-free oracle metric.
    pub oracle_value: f64,
}

/// Aggregates over the rows; all geometric means are over strictly
/// positive ratios.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregates {
    /// Geometric mean of predicted/HMP metric ratios (lower is better).
    pub predicted_vs_hmp: f64,
    /// Geometric mean of oracle/HMP ratios.
    pub oracle_vs_hmp: f64,
    /// Geometric mean of oracle/predicted: the fraction of oracle
    /// performance the predictor achieves (at most 1).
    pub oracle_performance_fraction: f64,
    pub exact_label_accuracy: f64,
    /// Extremes of the per-page predicted/HMP ratio (min-max bars).
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub repetitions_total: u64,
    pub mean_repetitions: f64,
    /// Fraction of measurements whose CI criterion was met within the cap.
    pub ci_met_fraction: f64,
}

/// Deterministic modeled overhead of switching from the baseline to each
/// page's predicted configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverheadSummary {
    pub migrations: usize,
    pub frequency_changes: usize,
    pub modeled_ms_total: f64,
    pub modeled_ms_mean: f64,
}

/// The full evaluation artifact; serialized as JSON next to a row CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub metric: Metric,
    pub mode: EvalMode,
    pub params: CostModelParams,
    pub c: f64,
    pub gamma: f64,
    pub label_set: Vec<ProcessorConfig>,
    pub rows: Vec<PageRow>,
    pub aggregates: Aggregates,
    pub overhead: OverheadSummary,
    /// Raw 73-value feature vector per row, for downstream importance and
    /// sweep reporting.
    pub feature_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Loocv,
    Holdout,
}

impl std::fmt::Display for EvalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalMode::Loocv => "loocv",
            EvalMode::Holdout => "holdout",
        })
    }
}

/// Runs the full evaluation for one metric over extracted pages.
pub fn evaluate_corpus(
    pages: &[(String, FeatureVector)],
    metric: Metric,
    params: &CostModelParams,
    mode: EvalMode,
) -> Result<EvaluationReport> {
    let data = generate_training_data(pages, metric, params)?;
    let (c, gamma) = resolve_hyperparameters(&data)?;

    let predictions: Vec<LoocvPrediction> = match mode {
        EvalMode::Loocv => {
            if pages.len() < 2 {
                return Err(Error::TooFewSamples {
                    needed: 2,
                    got: pages.len(),
                });
            }
            loocv(pages, metric, params, c, gamma, DEFAULT_TOL)?.predictions
        }
        EvalMode::Holdout => {
            let split = holdout_split(pages.len());
            let train: Vec<(String, FeatureVector)> = pages[..split].to_vec();
            let train_data = generate_training_data(&train, metric, params)?;
            let model = train_multiclass(
                &train_data.examples,
                &train_data.label_set,
                &train_data.normalization,
                c,
                gamma,
                DEFAULT_TOL,
            )?;
            pages[split..]
                .iter()
                .map(|(id, v)| {
                    Ok(LoocvPrediction {
                        page_id: id.clone(),
                        predicted: model.predict(v)?,
                        oracle: oracle_best(v, metric, params)?.0,
                    })
                })
                .collect::<Result<_>>()?
        }
    };

    let evaluated: Vec<(String, FeatureVector)> = predictions
        .iter()
        .map(|p| {
            pages
                .iter()
                .find(|(id, _)| *id == p.page_id)
                .cloned()
                .expect("prediction refers to a corpus page")
        })
        .collect();

    let hmp = hmp_baseline();
    let rows: Vec<PageRow> = predictions
        .par_iter()
        .zip(&evaluated)
        .map(|(p, (_, v))| {
            let predicted_value = measure_with_ci(v, &p.predicted, params, metric)?;
            let hmp_value = measure_with_ci(v, &hmp, params, metric)?;
            let oracle_value = oracle_best(v, metric, params)?.1.metric(metric);
            Ok(PageRow {
                page_id: p.page_id.clone(),
                predicted: p.predicted,
                oracle: p.oracle,
                predicted_value,
                hmp_value,
                oracle_value,
            })
        })
        .collect::<Result<_>>()?;

    let aggregates = compute_aggregates(&rows)?;
    let overhead = overhead_summary(&rows);
    let feature_matrix = evaluated.iter().map(|(_, v)| v.values.clone()).collect();

    Ok(EvaluationReport {
        metric,
        mode,
        params: params.clone(),
        c,
        gamma,
        label_set: data.label_set.configs,
        rows,
        aggregates,
        overhead,
        feature_matrix,
    })
}

/// Grid search once on the full corpus; folds re-use the winning pair.
/// Degenerate corpora (single label or fewer examples than folds) fall
/// back to mid-grid defaults.
fn resolve_hyperparameters(data: &crate::learn::TrainingData) -> Result<(f64, f64)> {
    let c_grid = crate::learn::default_c_grid();
    let gamma_grid = crate::learn::default_gamma_grid();
    if data.label_set.configs.len() < 2 || data.examples.len() < 5 {
        return Ok((1.0, 1.0 / crate::features::FEATURE_COUNT as f64));
    }
    grid_search(
        &data.examples,
        &data.label_set,
        &data.normalization,
        &c_grid,
        &gamma_grid,
        5,
    )
}

/// First `split` pages train, the rest evaluate (pages are in manifest
/// order, sorted by id).
pub fn holdout_split(n: usize) -> usize {
    ((n * 4).div_ceil(5)).clamp(1, n.saturating_sub(1).max(1))
}

pub fn compute_aggregates(rows: &[PageRow]) -> Result<Aggregates> {
    if rows.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let ratios: Vec<f64> = rows
        .iter()
        .map(|r| r.predicted_value.value / r.hmp_value.value)
        .collect();
    let oracle_ratios: Vec<f64> = rows.iter().map(|r| r.oracle_value / r.hmp_value.value).collect();
    let fractions: Vec<f64> = rows
        .iter()
        .map(|r| r.oracle_value / r.predicted_value.value)
        .collect();
    let correct = rows.iter().filter(|r| r.predicted == r.oracle).count();
    let reps: u64 = rows
        .iter()
        .map(|r| u64::from(r.predicted_value.repetitions) + u64::from(r.hmp_value.repetitions))
        .sum();
    let measurements = rows.len() as f64 * 2.0;
    let ci_met = rows
        .iter()
        .map(|r| usize::from(r.predicted_value.ci_met) + usize::from(r.hmp_value.ci_met))
        .sum::<usize>();

    Ok(Aggregates {
        predicted_vs_hmp: geometric_mean(&ratios),
        oracle_vs_hmp: geometric_mean(&oracle_ratios),
        oracle_performance_fraction: geometric_mean(&fractions),
        exact_label_accuracy: correct as f64 / rows.len() as f64,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        repetitions_total: reps,
        mean_repetitions: reps as f64 / measurements,
        ci_met_fraction: ci_met as f64 / measurements,
    })
}

fn overhead_summary(rows: &[PageRow]) -> OverheadSummary {
    use crate::sched::OverheadBudget;
    let hmp = hmp_baseline();
    let mut migrations = 0usize;
    let mut frequency_changes = 0usize;
    for row in rows {
        if row.predicted.render_core != hmp.render_core {
            migrations += 1;
        }
        frequency_changes += usize::from(row.predicted.f_big_ghz() != hmp.f_big_ghz())
            + usize::from(row.predicted.f_little_ghz() != hmp.f_little_ghz());
    }
    let total = migrations as f64 * OverheadBudget::MIGRATION_COST_MS
        + frequency_changes as f64 * OverheadBudget::FREQUENCY_SET_COST_MS;
    OverheadSummary {
        migrations,
        frequency_changes,
        modeled_ms_total: total,
        modeled_ms_mean: total / rows.len().max(1) as f64,
    }
}

impl EvaluationReport {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<EvaluationReport> {
        let raw = std::fs::read(path).map_err(Error::Io)?;
        serde_json::from_slice(&raw)
            .map_err(|e| Error::MalformedReport(format!("{}: {e}", path.display())))
    }

    /// Writes the per-page rows as CSV.
    pub fn write_rows_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "page_id",
            "predicted",
            "oracle",
            "predicted_value",
            "hmp_value",
            "oracle_value",
            "predicted_reps",
            "hmp_reps",
            "ci_met",
        ])?;
        for row in &self.rows {
            w.write_record([
                row.page_id.clone(),
                row.predicted.compact(),
                row.oracle.compact(),
                format!("{:.17e}", row.predicted_value.value),
                format!("{:.17e}", row.hmp_value.value),
                format!("{:.17e}", row.oracle_value),
                row.predicted_value.repetitions.to_string(),
                row.hmp_value.repetitions.to_string(),
                (row.predicted_value.ci_met && row.hmp_value.ci_met).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reconstructs rows from a CSV written by [`Self::write_rows_csv`];
    /// used to re-derive aggregates independently of the JSON.
    pub fn read_rows_csv(reader: impl std::io::Read) -> Result<Vec<PageRow>> {
        let mut r = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let field = |i: usize| -> Result<&str> {
                record
                    .get(i)
                    .ok_or_else(|| Error::MalformedReport(format!("row missing column {i}")))
            };
            let value = |i: usize| -> Result<f64> {
                field(i)?
                    .parse::<f64>()
                    .map_err(|e| Error::MalformedReport(format!("bad number in column {i}: {e}")))
            };
            let reps = |i: usize| -> Result<u32> {
                field(i)?
                    .parse::<u32>()
                    .map_err(|e| Error::MalformedReport(format!("bad count in column {i}: {e}")))
            };
            let ci_met = field(8)? == "true";
            rows.push(PageRow {
                page_id: field(0)?.to_string(),
                predicted: ProcessorConfig::parse_compact(field(1)?)?,
                oracle: ProcessorConfig::parse_compact(field(2)?)?,
                predicted_value: MeasuredValue {
                    value: value(3)?,
                    repetitions: reps(6)?,
                    ci_met,
                },
                hmp_value: MeasuredValue {
                    value: value(4)?,
                    repetitions: reps(7)?,
                    ci_met,
                },
                oracle_value: value(5)?,
            });
        }
        Ok(rows)
    }

    /// Oracle-label histogram: (config, pages) pairs in label-set order.
    pub fn label_histogram(&self) -> Vec<(ProcessorConfig, usize)> {
        self.label_set
            .iter()
            .map(|config| {
                let count = self.rows.iter().filter(|r| r.oracle == *config).count();
                (*config, count)
            })
            .collect()
    }

    /// Per-feature information gain ratio about the oracle labels.
    pub fn feature_importance(&self) -> Result<Vec<(String, f64)>> {
        let schema = FeatureSchema::standard();
        let names = schema.qualified_names();
        let labels: Vec<usize> = self
            .rows
            .iter()
            .map(|r| {
                self.label_set
                    .iter()
                    .position(|c| *c == r.oracle)
                    .ok_or_else(|| Error::MalformedReport("oracle config not in label set".into()))
            })
            .collect::<Result<_>>()?;
        let matrix = crate::features::FeatureMatrix {
            names: names.clone(),
            rows: self.feature_matrix.clone(),
        };
        let scores = match crate::features::information_gain_ratio(&matrix, &labels, 10) {
            Ok(scores) => scores,
            // single-label corpora carry no information
            Err(Error::SingleLabel) => vec![0.0; names.len()],
            Err(e) => return Err(e),
        };
        Ok(names.into_iter().zip(scores).collect())
    }
}
