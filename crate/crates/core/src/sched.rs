//! Simulated runtime deployment: predict during parsing, re-predict on
//! large DOM growth, apply configurations with migration and
//! frequency-switch overheads, and recommend a goal per network class.
//!
//! Deterministic costs (migration, frequency setting) are charged to the
//! session's load time; wall-clock timings of extraction and prediction are
//! logged for overhead reporting but kept out of the trace accounting so
//! identical inputs produce identical traces.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::LoadedPage;
use crate::device::{evaluate, hmp_baseline, CostModelParams, Metric, ProcessorConfig, WorkloadCost};
use crate::error::{Error, Result};
use crate::features::extract_vector;
use crate::learn::MulticlassSvmModel;
use crate::webparse::{snapshot_stream, DomSnapshot};

/// Relative DOM growth that triggers re-prediction (strictly greater-than).
pub const REPREDICT_THRESHOLD: f64 = 0.30;

/// Overhead constants.
#[derive(Debug, Clone, Copy)]
pub struct OverheadBudget;

impl OverheadBudget {
    /// Budget for extraction + prediction + frequency setting, ms.
    pub const PREDICTION_BUDGET_MS: f64 = 20.0;
    /// Cost of moving the rendering process across clusters, ms.
    pub const MIGRATION_COST_MS: f64 = 15.0;
    /// Cost of re-clocking one cluster, ms.
    pub const FREQUENCY_SET_COST_MS: f64 = 1.0;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverheadPhase {
    FeatureExtraction,
    Prediction,
    FrequencySetting,
    Migration,
}

/// Network technology and quality; quality is poor when packet loss
/// exceeds 30%.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkClass {
    pub technology: NetworkTechnology,
    pub quality: NetworkQuality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkTechnology {
    TwoG,
    ThreeG,
    FourG,
    WiFi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkQuality {
    Poor,
    Good,
}

/// Picks the optimization goal whose trade-off suits the network: download
/// time dominates on slow links, so energy can be saved there without
/// hurting the experience; fast links favor load time.
pub fn recommend_goal(network: NetworkClass) -> Metric {
    use NetworkQuality::*;
    use NetworkTechnology::*;
    match (network.technology, network.quality) {
        (TwoG, _) | (ThreeG, Poor) => Metric::Energy,
        (ThreeG, Good) | (FourG, Poor) | (WiFi, Poor) => Metric::Edp,
        (FourG, Good) | (WiFi, Good) => Metric::LoadTime,
    }
}

/// One rendering session driven by parser snapshots. Starts from the HMP
/// baseline configuration, the state the OS scheduler would leave the
/// platform in before the first prediction.
pub struct RuntimeSession<'m> {
    model: &'m MulticlassSvmModel,
    current_config: ProcessorConfig,
    last_prediction: Option<ProcessorConfig>,
    last_predicted_node_count: Option<usize>,
    overhead_log: Vec<(OverheadPhase, f64)>,
    reprediction_count: usize,
}

impl<'m> RuntimeSession<'m> {
    pub fn new(model: &'m MulticlassSvmModel) -> Self {
        RuntimeSession {
            model,
            current_config: hmp_baseline(),
            last_prediction: None,
            last_predicted_node_count: None,
            overhead_log: Vec::new(),
            reprediction_count: 0,
        }
    }

    pub fn model(&self) -> &MulticlassSvmModel {
        self.model
    }

    pub fn current_config(&self) -> ProcessorConfig {
        self.current_config
    }

    pub fn reprediction_count(&self) -> usize {
        self.reprediction_count
    }

    pub fn overhead_log(&self) -> &[(OverheadPhase, f64)] {
        &self.overhead_log
    }

    pub fn total_overhead_ms(&self) -> f64 {
        self.overhead_log.iter().map(|(_, ms)| ms).sum()
    }

    /// Sum of the wall-clock extraction and prediction entries.
    pub fn measured_prediction_ms(&self) -> f64 {
        self.overhead_log
            .iter()
            .filter(|(phase, _)| {
                matches!(phase, OverheadPhase::FeatureExtraction | OverheadPhase::Prediction)
            })
            .map(|(_, ms)| ms)
            .sum()
    }

    fn predict_timed(&mut self, snapshot: &DomSnapshot) -> Result<ProcessorConfig> {
        let started = Instant::now();
        let features = extract_vector(
            &snapshot.tree,
            &snapshot.styles,
            snapshot.bytes_consumed as f64 / 1024.0,
        );
        let extraction_ms = started.elapsed().as_secs_f64() * 1e3;
        self.overhead_log.push((OverheadPhase::FeatureExtraction, extraction_ms));

        let started = Instant::now();
        let config = self.model.predict(&features)?;
        let prediction_ms = started.elapsed().as_secs_f64() * 1e3;
        self.overhead_log.push((OverheadPhase::Prediction, prediction_ms));

        self.last_prediction = Some(config);
        self.last_predicted_node_count = Some(snapshot.tree.node_count);
        Ok(config)
    }

    /// First prediction, as soon as a DOM tree is available.
    pub fn initial_predict(&mut self, snapshot: &DomSnapshot) -> Result<ProcessorConfig> {
        self.predict_timed(snapshot)
    }

    /// Re-predicts iff the node count drifted by strictly more than 30%
    /// relative to the count used for the last prediction. Returns whether
    /// the predicted configuration changed, plus the current prediction.
    pub fn maybe_repredict(&mut self, snapshot: &DomSnapshot) -> Result<(bool, ProcessorConfig)> {
        let (Some(previous), Some(n_old)) = (self.last_prediction, self.last_predicted_node_count)
        else {
            return Err(Error::InvalidArgument(
                "maybe_repredict called before initial_predict".into(),
            ));
        };
        let n_new = snapshot.tree.node_count;
        // growth from an empty tree is maximal change
        let triggered = if n_old == 0 {
            n_new > 0
        } else {
            let diff = (n_new as f64 - n_old as f64).abs() / n_old as f64;
            diff > REPREDICT_THRESHOLD
        };
        if !triggered {
            return Ok((false, previous));
        }
        self.reprediction_count += 1;
        let config = self.predict_timed(snapshot)?;
        Ok((config != previous, config))
    }

    /// Applies a configuration: 15 ms to migrate the rendering process on a
    /// core switch plus 1 ms per cluster whose frequency changes. A no-op
    /// costs nothing. Returns the charged milliseconds.
    pub fn apply_config(&mut self, config: ProcessorConfig) -> f64 {
        let mut cost = 0.0;
        if config.render_core != self.current_config.render_core {
            cost += OverheadBudget::MIGRATION_COST_MS;
            self.overhead_log
                .push((OverheadPhase::Migration, OverheadBudget::MIGRATION_COST_MS));
        }
        for changed in [
            config.f_big_ghz() != self.current_config.f_big_ghz(),
            config.f_little_ghz() != self.current_config.f_little_ghz(),
        ] {
            if changed {
                cost += OverheadBudget::FREQUENCY_SET_COST_MS;
                self.overhead_log.push((
                    OverheadPhase::FrequencySetting,
                    OverheadBudget::FREQUENCY_SET_COST_MS,
                ));
            }
        }
        self.current_config = config;
        cost
    }
}

/// One record in a session trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Snapshot {
        index: usize,
        bytes_consumed: usize,
        node_count: usize,
    },
    Prediction {
        config: ProcessorConfig,
        initial: bool,
        changed: bool,
    },
    Migration {
        cost_ms: f64,
    },
    FrequencySetting {
        cost_ms: f64,
    },
    FinalCost {
        config: ProcessorConfig,
        device: WorkloadCost,
        overhead_ms: f64,
        load_time_with_overhead_s: f64,
    },
}

/// Full record of a simulated rendering session.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionTrace {
    pub page_id: String,
    pub events: Vec<TraceEvent>,
    pub final_config: ProcessorConfig,
    pub device_cost: WorkloadCost,
    /// Deterministic scheduling overhead charged to load time, ms.
    pub overhead_ms: f64,
    pub load_time_with_overhead_s: f64,
    pub reprediction_count: usize,
    /// Wall-clock extraction + prediction time; diagnostic, excluded from
    /// the load-time accounting.
    #[serde(skip)]
    pub measured_prediction_ms: f64,
}

impl SessionTrace {
    /// Serializes one JSON record per event.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Streams the page through the parser, predicting on the first snapshot
/// and re-checking on each later one, then scores the final configuration
/// and adds the deterministic scheduling overheads to its load time.
pub fn run_session(
    page: &LoadedPage,
    model: &MulticlassSvmModel,
    params: &CostModelParams,
    chunk_size: usize,
) -> Result<SessionTrace> {
    if chunk_size == 0 {
        return Err(Error::InvalidArgument("chunk_size must be at least 1".into()));
    }
    let mut session = RuntimeSession::new(model);
    let mut events = Vec::new();
    let mut modeled_overhead_ms = 0.0;
    let mut final_features = None;

    for (index, snapshot) in snapshot_stream(&page.html, &page.css, chunk_size).enumerate() {
        events.push(TraceEvent::Snapshot {
            index,
            bytes_consumed: snapshot.bytes_consumed,
            node_count: snapshot.tree.node_count,
        });
        let (apply, initial, changed) = if index == 0 {
            let config = session.initial_predict(&snapshot)?;
            (Some(config), true, true)
        } else {
            let (changed, config) = session.maybe_repredict(&snapshot)?;
            (changed.then_some(config), false, changed)
        };
        if initial || changed {
            events.push(TraceEvent::Prediction {
                config: apply.expect("changed predictions carry a config"),
                initial,
                changed,
            });
        }
        if let Some(config) = apply {
            let before = session.overhead_log().len();
            modeled_overhead_ms += session.apply_config(config);
            for (phase, ms) in &session.overhead_log()[before..] {
                events.push(match phase {
                    OverheadPhase::Migration => TraceEvent::Migration { cost_ms: *ms },
                    _ => TraceEvent::FrequencySetting { cost_ms: *ms },
                });
            }
        }
        final_features = Some(extract_vector(
            &snapshot.tree,
            &snapshot.styles,
            snapshot.bytes_consumed as f64 / 1024.0,
        ));
    }

    let features = final_features.expect("streams yield at least one snapshot");
    let final_config = session.current_config();
    let device_cost = evaluate(&features, &final_config, params)?;
    let load_time_with_overhead_s = device_cost.load_time_s + modeled_overhead_ms / 1e3;
    events.push(TraceEvent::FinalCost {
        config: final_config,
        device: device_cost,
        overhead_ms: modeled_overhead_ms,
        load_time_with_overhead_s,
    });

    Ok(SessionTrace {
        page_id: page.id.clone(),
        events,
        final_config,
        device_cost,
        overhead_ms: modeled_overhead_ms,
        load_time_with_overhead_s,
        reprediction_count: session.reprediction_count(),
        measured_prediction_ms: session.measured_prediction_ms(),
    })
}
