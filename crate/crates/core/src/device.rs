//! The simulated big.LITTLE device: the processor-configuration space and
//! an analytic cost model for render time, power, energy and EDP, plus the
//! brute-force oracle and baseline policies.
//!
//! The model is parametric and synthetic. Its structure is chosen so the
//! per-page optimum depends on the workload mix, not just its magnitude:
//! heavier pages heat the big core and pull the throttle knee down
//! (load-time optima spread over the top frequencies), memory-stall work
//! scales with stylesheet and byte volume rather than frequency (energy
//! optima split between the little core and a low-frequency big core), and
//! a fixed idle tail penalizes parking clocks high on small pages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    FeatureSchema, FeatureVector, OTHER_DOM_NODES, OTHER_DOM_TREE_DEPTH, OTHER_PAGE_SIZE_KB,
    OTHER_STYLE_RULES,
};

/// Which cluster runs the rendering process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoreKind {
    Big,
    Little,
}

impl CoreKind {
    pub fn other(self) -> CoreKind {
        match self {
            CoreKind::Big => CoreKind::Little,
            CoreKind::Little => CoreKind::Big,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CoreKind::Big => "big",
            CoreKind::Little => "little",
        }
    }
}

/// Frequency grid in 0.1 GHz steps: big 0.4-2.0, little 0.4-1.4.
pub const BIG_FREQ_DECI_GHZ: std::ops::RangeInclusive<u8> = 4..=20;
pub const LITTLE_FREQ_DECI_GHZ: std::ops::RangeInclusive<u8> = 4..=14;

/// One point in the configuration space: render core plus both cluster
/// frequencies. Frequencies are stored in deci-GHz so configurations hash
/// and compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcessorConfig {
    pub render_core: CoreKind,
    f_big_dghz: u8,
    f_little_dghz: u8,
}

impl ProcessorConfig {
    /// Builds a configuration, validating both frequencies against the grid.
    pub fn new(render_core: CoreKind, f_big_ghz: f64, f_little_ghz: f64) -> Result<Self> {
        let f_big_dghz = to_grid(f_big_ghz, BIG_FREQ_DECI_GHZ)
            .ok_or(Error::OffGridFrequency { core: "big", ghz: f_big_ghz })?;
        let f_little_dghz = to_grid(f_little_ghz, LITTLE_FREQ_DECI_GHZ)
            .ok_or(Error::OffGridFrequency { core: "little", ghz: f_little_ghz })?;
        Ok(ProcessorConfig {
            render_core,
            f_big_dghz,
            f_little_dghz,
        })
    }

    pub fn f_big_ghz(&self) -> f64 {
        f64::from(self.f_big_dghz) / 10.0
    }

    pub fn f_little_ghz(&self) -> f64 {
        f64::from(self.f_little_dghz) / 10.0
    }

    /// Frequency of the given cluster.
    pub fn freq_ghz(&self, core: CoreKind) -> f64 {
        match core {
            CoreKind::Big => self.f_big_ghz(),
            CoreKind::Little => self.f_little_ghz(),
        }
    }

    /// Frequency the rendering process runs at.
    pub fn render_freq_ghz(&self) -> f64 {
        self.freq_ghz(self.render_core)
    }

    fn key(&self) -> u32 {
        (match self.render_core {
            CoreKind::Big => 0u32,
            CoreKind::Little => 1,
        } << 16)
            | (u32::from(self.f_big_dghz) << 8)
            | u32::from(self.f_little_dghz)
    }

    /// Compact colon-separated form, e.g. `big:0.9:0.4`, safe inside CSV.
    pub fn compact(&self) -> String {
        format!(
            "{}:{:.1}:{:.1}",
            self.render_core.name(),
            self.f_big_ghz(),
            self.f_little_ghz()
        )
    }

    pub fn parse_compact(s: &str) -> Result<ProcessorConfig> {
        let mut parts = s.split(':');
        let (Some(core), Some(big), Some(little), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::InvalidArgument(format!("bad config string {s:?}")));
        };
        let render_core = match core {
            "big" => CoreKind::Big,
            "little" => CoreKind::Little,
            other => return Err(Error::InvalidArgument(format!("bad core {other:?}"))),
        };
        let parse = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad frequency {x:?}")))
        };
        ProcessorConfig::new(render_core, parse(big)?, parse(little)?)
    }
}

fn to_grid(ghz: f64, range: std::ops::RangeInclusive<u8>) -> Option<u8> {
    let deci = (ghz * 10.0).round();
    if (deci - ghz * 10.0).abs() > 1e-6 {
        return None;
    }
    let deci = deci as i64;
    let deci = u8::try_from(deci).ok()?;
    range.contains(&deci).then_some(deci)
}

impl std::fmt::Display for ProcessorConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {:.1}, {:.1})",
            self.render_core.name(),
            self.f_big_ghz(),
            self.f_little_ghz()
        )
    }
}

impl Serialize for ProcessorConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ProcessorConfig", 3)?;
        s.serialize_field("render_core", &self.render_core)?;
        s.serialize_field("f_big_ghz", &self.f_big_ghz())?;
        s.serialize_field("f_little_ghz", &self.f_little_ghz())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ProcessorConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            render_core: CoreKind,
            f_big_ghz: f64,
            f_little_ghz: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        ProcessorConfig::new(raw.render_core, raw.f_big_ghz, raw.f_little_ghz)
            .map_err(serde::de::Error::custom)
    }
}

/// The three optimization goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    LoadTime,
    Energy,
    Edp,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::LoadTime, Metric::Energy, Metric::Edp];

    pub fn name(self) -> &'static str {
        match self {
            Metric::LoadTime => "time",
            Metric::Energy => "energy",
            Metric::Edp => "edp",
        }
    }

    pub fn parse(s: &str) -> Result<Metric> {
        match s {
            "time" | "load_time" | "load-time" => Ok(Metric::LoadTime),
            "energy" => Ok(Metric::Energy),
            "edp" => Ok(Metric::Edp),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cost of rendering one page under one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadCost {
    pub load_time_s: f64,
    pub energy_j: f64,
    pub edp_js: f64,
}

impl WorkloadCost {
    pub fn new(load_time_s: f64, energy_j: f64) -> Self {
        WorkloadCost {
            load_time_s,
            energy_j,
            edp_js: energy_j * load_time_s,
        }
    }

    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::LoadTime => self.load_time_s,
            Metric::Energy => self.energy_j,
            Metric::Edp => self.edp_js,
        }
    }
}

/// Parameters of the synthetic time/power model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModelParams {
    /// Work units per GHz-second per cluster.
    pub ipc_big: f64,
    pub ipc_little: f64,
    /// Fraction of the render work mirrored on the non-render cluster.
    pub alpha_aux: f64,
    /// Static power per cluster, W.
    pub p_stat_big: f64,
    pub p_stat_little: f64,
    /// Cubic dynamic-power coefficients, W/GHz^3.
    pub kappa_big: f64,
    pub kappa_little: f64,
    /// Base throttle knee, GHz; the big core loses effective speed above it.
    pub throttle_knee: f64,
    /// Effective-speed loss per GHz above the knee.
    pub throttle_slope: f64,
    /// How far (GHz) the knee drops as the thermal load factor goes 0 -> 1.
    pub throttle_thermal_drop: f64,
    /// Work weight at which the thermal load factor reaches 1/2.
    pub thermal_w_half: f64,
    /// Workload-weight coefficients:
    /// intercept, nodes, rules, size_kb, depth, media tags.
    pub beta: [f64; 6],
    /// Memory-stall weight coefficients: intercept, rules, size_kb.
    pub mem_mu: [f64; 3],
    /// Memory bandwidth per cluster, work units per second.
    pub bw_big: f64,
    pub bw_little: f64,
    /// Fraction of dynamic power burned while stalled on memory.
    pub stall_power_frac: f64,
    /// Fraction of a cluster's static power burned while it idles.
    pub idle_gate: f64,
    /// Fraction of dynamic power burned at the configured clock while idle.
    pub idle_power_frac: f64,
    /// Board/system power over the whole load, W.
    pub p_sys: f64,
    /// Post-load idle tail charged to energy, seconds.
    pub tail_s: f64,
    /// Relative sigma of the multiplicative log-normal noise on render time.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for CostModelParams {
    fn default() -> Self {
        CostModelParams {
            ipc_big: 2.0,
            ipc_little: 1.0,
            alpha_aux: 0.05,
            p_stat_big: 0.3,
            p_stat_little: 0.05,
            kappa_big: 1.0,
            kappa_little: 0.25,
            throttle_knee: 1.8,
            throttle_slope: 0.5,
            throttle_thermal_drop: 0.6,
            thermal_w_half: 15.0,
            beta: [1.0, 0.01, 0.005, 0.002, 0.05, 0.1],
            mem_mu: [0.2, 0.01, 0.004],
            bw_big: 2.5,
            bw_little: 2.5,
            stall_power_frac: 0.3,
            idle_gate: 0.2,
            idle_power_frac: 0.1,
            p_sys: 0.8,
            tail_s: 0.4,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl CostModelParams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("ipc_big", self.ipc_big),
            ("ipc_little", self.ipc_little),
            ("alpha_aux", self.alpha_aux),
            ("p_stat_big", self.p_stat_big),
            ("p_stat_little", self.p_stat_little),
            ("kappa_big", self.kappa_big),
            ("kappa_little", self.kappa_little),
            ("throttle_knee", self.throttle_knee),
            ("thermal_w_half", self.thermal_w_half),
            ("bw_big", self.bw_big),
            ("bw_little", self.bw_little),
        ];
        for (name, value) in positives {
            if !(value > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        let non_negatives = [
            ("throttle_slope", self.throttle_slope),
            ("throttle_thermal_drop", self.throttle_thermal_drop),
            ("stall_power_frac", self.stall_power_frac),
            ("idle_gate", self.idle_gate),
            ("idle_power_frac", self.idle_power_frac),
            ("p_sys", self.p_sys),
            ("tail_s", self.tail_s),
            ("noise_sigma", self.noise_sigma),
        ];
        for (name, value) in non_negatives {
            if !(value >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be non-negative, got {value}"
                )));
            }
        }
        if self.throttle_knee > 2.0 {
            return Err(Error::InvalidParams(format!(
                "throttle_knee must be <= 2.0 GHz, got {}",
                self.throttle_knee
            )));
        }
        Ok(())
    }

    fn ipc(&self, core: CoreKind) -> f64 {
        match core {
            CoreKind::Big => self.ipc_big,
            CoreKind::Little => self.ipc_little,
        }
    }

    fn p_stat(&self, core: CoreKind) -> f64 {
        match core {
            CoreKind::Big => self.p_stat_big,
            CoreKind::Little => self.p_stat_little,
        }
    }

    fn kappa(&self, core: CoreKind) -> f64 {
        match core {
            CoreKind::Big => self.kappa_big,
            CoreKind::Little => self.kappa_little,
        }
    }

    fn bandwidth(&self, core: CoreKind) -> f64 {
        match core {
            CoreKind::Big => self.bw_big,
            CoreKind::Little => self.bw_little,
        }
    }
}

struct FeatureIdx {
    nodes: usize,
    depth: usize,
    rules: usize,
    size_kb: usize,
    img: usize,
    table: usize,
    iframe: usize,
}

fn feature_idx() -> &'static FeatureIdx {
    use std::sync::OnceLock;
    static IDX: OnceLock<FeatureIdx> = OnceLock::new();
    IDX.get_or_init(|| {
        let schema = FeatureSchema::standard();
        let pos = |name: &str| schema.position(name).expect("schema feature");
        FeatureIdx {
            nodes: schema.other_index(OTHER_DOM_NODES),
            depth: schema.other_index(OTHER_DOM_TREE_DEPTH),
            rules: schema.other_index(OTHER_STYLE_RULES),
            size_kb: schema.other_index(OTHER_PAGE_SIZE_KB),
            img: pos("tag.img"),
            table: pos("tag.table"),
            iframe: pos("tag.iframe"),
        }
    })
}

/// Compute-work weight of a page from its raw feature vector:
/// `W = b0 + b1*nodes + b2*rules + b3*size_kb + b4*depth + b5*(img+table+iframe)`.
/// Strictly positive for any page.
pub fn workload_weight(v: &FeatureVector, p: &CostModelParams) -> f64 {
    let idx = feature_idx();
    let media = v.values[idx.img] + v.values[idx.table] + v.values[idx.iframe];
    let [b0, b1, b2, b3, b4, b5] = p.beta;
    b0 + b1 * v.values[idx.nodes]
        + b2 * v.values[idx.rules]
        + b3 * v.values[idx.size_kb]
        + b4 * v.values[idx.depth]
        + b5 * media
}

/// Memory-stall work weight; scales with rule and byte volume.
pub fn memory_weight(v: &FeatureVector, p: &CostModelParams) -> f64 {
    let idx = feature_idx();
    let [m0, m1, m2] = p.mem_mu;
    m0 + m1 * v.values[idx.rules] + m2 * v.values[idx.size_kb]
}

/// Thermal load factor in (0, 1): heavier pages run hotter.
fn thermal_load(v: &FeatureVector, p: &CostModelParams) -> f64 {
    let total = workload_weight(v, p) + memory_weight(v, p);
    total / (total + p.thermal_w_half)
}

/// Effective-speed multiplier. Only the big core throttles; its knee drops
/// with the page's thermal load.
fn theta(core: CoreKind, f_ghz: f64, thermal: f64, p: &CostModelParams) -> f64 {
    match core {
        CoreKind::Little => 1.0,
        CoreKind::Big => {
            let knee = p.throttle_knee - p.throttle_thermal_drop * thermal;
            (1.0 - p.throttle_slope * (f_ghz - knee).max(0.0)).max(0.05)
        }
    }
}

fn speed(core: CoreKind, f_ghz: f64, thermal: f64, p: &CostModelParams) -> f64 {
    p.ipc(core) * f_ghz * theta(core, f_ghz, thermal, p)
}

fn p_active(core: CoreKind, f_ghz: f64, p: &CostModelParams) -> f64 {
    p.p_stat(core) + p.kappa(core) * f_ghz.powi(3)
}

fn p_idle(core: CoreKind, f_ghz: f64, p: &CostModelParams) -> f64 {
    p.idle_gate * p.p_stat(core) + p.idle_power_frac * p.kappa(core) * f_ghz.powi(3)
}

/// Scores one page under one configuration. Deterministic given the params
/// seed; with `noise_sigma > 0` a multiplicative log-normal factor, seeded
/// per (page, config, rep), is applied to the render time.
pub fn evaluate_rep(
    v: &FeatureVector,
    c: &ProcessorConfig,
    p: &CostModelParams,
    rep: u32,
) -> Result<WorkloadCost> {
    p.validate()?;
    let noise = if p.noise_sigma > 0.0 {
        noise_factor(v, c, p, rep)
    } else {
        1.0
    };
    Ok(evaluate_inner(v, c, p, noise))
}

/// Scores one page under one configuration (first repetition).
pub fn evaluate(v: &FeatureVector, c: &ProcessorConfig, p: &CostModelParams) -> Result<WorkloadCost> {
    evaluate_rep(v, c, p, 0)
}

fn evaluate_inner(
    v: &FeatureVector,
    c: &ProcessorConfig,
    p: &CostModelParams,
    noise: f64,
) -> WorkloadCost {
    let work = workload_weight(v, p);
    let mem = memory_weight(v, p);
    let thermal = thermal_load(v, p);

    let render = c.render_core;
    let other = render.other();
    let f_render = c.freq_ghz(render);
    let f_other = c.freq_ghz(other);

    // render phase: compute plus memory stalls, noise scales the whole phase
    let t_cpu = work / speed(render, f_render, thermal, p) * noise;
    let t_stall = mem / p.bandwidth(render) * noise;
    // auxiliary phase on the other cluster
    let t_aux = p.alpha_aux * work / speed(other, f_other, thermal, p);
    let load_time = t_cpu + t_stall + t_aux;

    let p_stall =
        p.p_stat(render) + p.stall_power_frac * p.kappa(render) * f_render.powi(3);
    let energy = t_cpu * (p_active(render, f_render, p) + p.idle_gate * p.p_stat(other))
        + t_stall * (p_stall + p.idle_gate * p.p_stat(other))
        + t_aux * (p_active(other, f_other, p) + p.idle_gate * p.p_stat(render))
        + p.p_sys * load_time
        + p.tail_s
            * (p_idle(CoreKind::Big, c.f_big_ghz(), p)
                + p_idle(CoreKind::Little, c.f_little_ghz(), p));

    WorkloadCost::new(load_time, energy)
}

fn noise_factor(v: &FeatureVector, c: &ProcessorConfig, p: &CostModelParams, rep: u32) -> f64 {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    let mut key = fnv1a(p.seed.to_le_bytes().as_slice(), 0xcbf2_9ce4_8422_2325);
    for x in &v.values {
        key = fnv1a(&x.to_bits().to_le_bytes(), key);
    }
    key = fnv1a(&c.key().to_le_bytes(), key);
    key = fnv1a(&rep.to_le_bytes(), key);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(key);
    let z: f64 = StandardNormal.sample(&mut rng);
    (p.noise_sigma * z).exp()
}

fn fnv1a(bytes: &[u8], mut hash: u64) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// All 374 grid configurations in fixed lexicographic order:
/// big-rendered first, frequencies ascending.
pub fn enumerate_configs() -> Vec<ProcessorConfig> {
    let mut configs = Vec::with_capacity(374);
    for render_core in [CoreKind::Big, CoreKind::Little] {
        for f_big_dghz in BIG_FREQ_DECI_GHZ {
            for f_little_dghz in LITTLE_FREQ_DECI_GHZ {
                configs.push(ProcessorConfig {
                    render_core,
                    f_big_dghz,
                    f_little_dghz,
                });
            }
        }
    }
    configs
}

/// Exhaustive argmin of the metric over all configurations, evaluated
/// noise-free. Ties break toward the earlier enumeration entry.
pub fn oracle_best(
    v: &FeatureVector,
    m: Metric,
    p: &CostModelParams,
) -> Result<(ProcessorConfig, WorkloadCost)> {
    let quiet = CostModelParams {
        noise_sigma: 0.0,
        ..p.clone()
    };
    quiet.validate()?;
    let mut best: Option<(ProcessorConfig, WorkloadCost)> = None;
    for c in enumerate_configs() {
        let cost = evaluate_inner(v, &c, &quiet, 1.0);
        match &best {
            Some((_, incumbent)) if cost.metric(m) >= incumbent.metric(m) => {}
            _ => best = Some((c, cost)),
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// The modeled OS scheduler: a performance governor running everything at
/// the maximum frequencies with the rendering process on the big core.
pub fn hmp_baseline() -> ProcessorConfig {
    ProcessorConfig {
        render_core: CoreKind::Big,
        f_big_dghz: 20,
        f_little_dghz: 14,
    }
}

/// Geometric-mean metric ratio vs. the HMP baseline for each labeled
/// configuration applied corpus-wide. Ratios below 1 mean the fixed
/// configuration beats the baseline on average.
pub fn fixed_config_sweep(
    corpus: &[FeatureVector],
    labels: &[ProcessorConfig],
    m: Metric,
    p: &CostModelParams,
) -> Result<Vec<(ProcessorConfig, f64)>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let quiet = CostModelParams {
        noise_sigma: 0.0,
        ..p.clone()
    };
    quiet.validate()?;
    let hmp = hmp_baseline();
    labels
        .iter()
        .map(|config| {
            let mut log_sum = 0.0;
            for v in corpus {
                let ours = evaluate_inner(v, config, &quiet, 1.0).metric(m);
                let base = evaluate_inner(v, &hmp, &quiet, 1.0).metric(m);
                log_sum += (ours / base).ln();
            }
            Ok((*config, (log_sum / corpus.len() as f64).exp()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureSchema, FeatureVector};

    fn page(nodes: f64, rules: f64, size_kb: f64, depth: f64) -> FeatureVector {
        let idx = feature_idx();
        let mut v = FeatureVector::zeros();
        v.values[idx.nodes] = nodes;
        v.values[idx.rules] = rules;
        v.values[idx.size_kb] = size_kb;
        v.values[idx.depth] = depth;
        v
    }

    fn config(core: CoreKind, big: f64, little: f64) -> ProcessorConfig {
        ProcessorConfig::new(core, big, little).unwrap()
    }

    #[test]
    fn workload_weight_is_intercept_on_empty_page() {
        let p = CostModelParams::default();
        assert_eq!(workload_weight(&FeatureVector::zeros(), &p), 1.0);
    }

    #[test]
    fn workload_weight_counts_nodes() {
        let p = CostModelParams::default();
        assert_eq!(workload_weight(&page(100.0, 0.0, 0.0, 0.0), &p), 2.0);
    }

    // Hand arithmetic: 1 + 0.01*754 + 0.005*645 + 0.002*2448 + 0.05*13
    //                = 1 + 7.54 + 3.225 + 4.896 + 0.65 = 17.311
    #[test]
    fn workload_weight_wikipedia_like() {
        let p = CostModelParams::default();
        let w = workload_weight(&page(754.0, 645.0, 2448.0, 13.0), &p);
        assert!((w - 17.311).abs() < 1e-9, "got {w}");
    }

    #[test]
    fn media_tags_add_weight() {
        let p = CostModelParams::default();
        let schema = FeatureSchema::standard();
        let mut v = FeatureVector::zeros();
        v.values[schema.position("tag.img").unwrap()] = 3.0;
        v.values[schema.position("tag.table").unwrap()] = 1.0;
        v.values[schema.position("tag.iframe").unwrap()] = 1.0;
        assert_eq!(workload_weight(&v, &p), 1.0 + 0.1 * 5.0);
    }

    // With a fixed knee at 1.8 and slope 0.5, the top grid step loses more
    // effective speed than it gains in clock: 2.0*0.9 < 1.9*0.95.
    #[test]
    fn top_frequency_throttles_below_second_highest() {
        let p = CostModelParams {
            throttle_thermal_drop: 0.0,
            ..CostModelParams::default()
        };
        let s20 = speed(CoreKind::Big, 2.0, 0.0, &p);
        let s19 = speed(CoreKind::Big, 1.9, 0.0, &p);
        assert!((s20 - p.ipc_big * 2.0 * 0.9).abs() < 1e-12);
        assert!((s19 - p.ipc_big * 1.9 * 0.95).abs() < 1e-12);
        assert!(s20 < s19);
    }

    #[test]
    fn two_ghz_is_never_the_load_time_optimum() {
        let p = CostModelParams::default();
        for v in [
            page(4.0, 2.0, 40.0, 2.0),
            page(754.0, 645.0, 2448.0, 13.0),
            page(8000.0, 3000.0, 5120.0, 25.0),
        ] {
            let (best, _) = oracle_best(&v, Metric::LoadTime, &p).unwrap();
            assert!(best.f_big_ghz() < 2.0, "optimum {best}");
        }
    }

    #[test]
    fn edp_is_energy_times_time() {
        let cost = WorkloadCost::new(3.0, 2.0);
        assert_eq!(cost.edp_js, 6.0);

        let p = CostModelParams::default();
        let v = page(100.0, 50.0, 300.0, 8.0);
        for c in enumerate_configs() {
            let cost = evaluate(&v, &c, &p).unwrap();
            assert_eq!(cost.edp_js, cost.energy_j * cost.load_time_s);
        }
    }

    #[test]
    fn evaluate_is_deterministic_without_noise() {
        let p = CostModelParams::default();
        let v = page(300.0, 100.0, 500.0, 10.0);
        let c = config(CoreKind::Big, 1.3, 0.7);
        assert_eq!(evaluate(&v, &c, &p).unwrap(), evaluate(&v, &c, &p).unwrap());
    }

    #[test]
    fn noise_is_deterministic_per_page_config_rep() {
        let p = CostModelParams {
            noise_sigma: 0.05,
            seed: 9,
            ..CostModelParams::default()
        };
        let v = page(300.0, 100.0, 500.0, 10.0);
        let c = config(CoreKind::Big, 1.3, 0.7);
        assert_eq!(
            evaluate_rep(&v, &c, &p, 0).unwrap(),
            evaluate_rep(&v, &c, &p, 0).unwrap()
        );
        assert_ne!(
            evaluate_rep(&v, &c, &p, 0).unwrap(),
            evaluate_rep(&v, &c, &p, 1).unwrap()
        );
        let reseeded = CostModelParams { seed: 10, ..p.clone() };
        assert_ne!(
            evaluate_rep(&v, &c, &p, 0).unwrap(),
            evaluate_rep(&v, &c, &reseeded, 0).unwrap()
        );
    }

    #[test]
    fn noise_sample_sigma_tracks_parameter() {
        let sigma = 0.05;
        let p = CostModelParams {
            noise_sigma: sigma,
            seed: 4,
            ..CostModelParams::default()
        };
        let v = page(300.0, 100.0, 500.0, 10.0);
        let c = config(CoreKind::Big, 1.0, 1.0);
        let base = {
            let quiet = CostModelParams { noise_sigma: 0.0, ..p.clone() };
            evaluate(&v, &c, &quiet).unwrap().load_time_s
        };
        let aux = p.alpha_aux * workload_weight(&v, &p)
            / speed(CoreKind::Little, 1.0, thermal_load(&v, &p), &p);
        let draws: Vec<f64> = (0..10_000)
            .map(|rep| {
                // isolate the noisy render phase
                (evaluate_rep(&v, &c, &p, rep).unwrap().load_time_s - aux) / (base - aux)
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        let rel_sigma = var.sqrt() / mean;
        assert!(
            (rel_sigma - sigma).abs() / sigma < 0.2,
            "sample sigma {rel_sigma} vs {sigma}"
        );
    }

    #[test]
    fn grid_has_374_configs_in_fixed_order() {
        let configs = enumerate_configs();
        assert_eq!(configs.len(), 374);
        assert_eq!(configs[0], config(CoreKind::Big, 0.4, 0.4));
        assert!(configs.contains(&config(CoreKind::Big, 0.9, 0.4)));
        let mut dedup = configs.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 374);
    }

    #[test]
    fn off_grid_frequencies_are_rejected() {
        assert!(ProcessorConfig::new(CoreKind::Big, 2.1, 0.4).is_err());
        assert!(ProcessorConfig::new(CoreKind::Big, 0.45, 0.4).is_err());
        assert!(ProcessorConfig::new(CoreKind::Big, 1.0, 1.5).is_err());
        assert!(ProcessorConfig::new(CoreKind::Big, 0.3, 0.4).is_err());
    }

    #[test]
    fn oracle_dominates_every_config() {
        let p = CostModelParams::default();
        let v = page(500.0, 200.0, 800.0, 12.0);
        for m in Metric::ALL {
            let (_, best) = oracle_best(&v, m, &p).unwrap();
            for c in enumerate_configs() {
                let cost = evaluate(&v, &c, &p).unwrap();
                assert!(best.metric(m) <= cost.metric(m));
            }
        }
    }

    #[test]
    fn oracle_is_deterministic_for_identical_pages() {
        let p = CostModelParams::default();
        let a = page(300.0, 100.0, 500.0, 10.0);
        let b = page(300.0, 100.0, 500.0, 10.0);
        for m in Metric::ALL {
            assert_eq!(
                oracle_best(&a, m, &p).unwrap().0,
                oracle_best(&b, m, &p).unwrap().0
            );
        }
    }

    #[test]
    fn load_time_oracle_renders_on_big_and_energy_on_little_for_light_pages() {
        let p = CostModelParams::default();
        let light_memory_bound = page(10.0, 400.0, 1500.0, 3.0);
        let (time_best, _) = oracle_best(&light_memory_bound, Metric::LoadTime, &p).unwrap();
        assert_eq!(time_best.render_core, CoreKind::Big);
        let (energy_best, _) = oracle_best(&light_memory_bound, Metric::Energy, &p).unwrap();
        assert_eq!(energy_best.render_core, CoreKind::Little);
    }

    #[test]
    fn hmp_is_max_frequencies_on_big() {
        assert_eq!(hmp_baseline(), config(CoreKind::Big, 2.0, 1.4));
    }

    #[test]
    fn oracle_beats_hmp_on_a_small_corpus() {
        let p = CostModelParams::default();
        let corpus = [
            page(10.0, 5.0, 50.0, 3.0),
            page(300.0, 150.0, 400.0, 9.0),
            page(4000.0, 900.0, 3000.0, 18.0),
        ];
        let hmp = hmp_baseline();
        for v in &corpus {
            let hmp_cost = evaluate(v, &hmp, &p).unwrap();
            let (_, time_best) = oracle_best(v, Metric::LoadTime, &p).unwrap();
            assert!(time_best.load_time_s <= hmp_cost.load_time_s);
            let (_, energy_best) = oracle_best(v, Metric::Energy, &p).unwrap();
            assert!(energy_best.energy_j < hmp_cost.energy_j);
        }
    }

    // With throttling disabled, time falls and dynamic power rises strictly
    // with the render frequency.
    #[test]
    fn monotone_in_frequency_without_throttling() {
        let p = CostModelParams {
            throttle_slope: 0.0,
            throttle_thermal_drop: 0.0,
            ..CostModelParams::default()
        };
        let v = page(200.0, 80.0, 300.0, 7.0);
        let mut last_time = f64::INFINITY;
        for f_big in BIG_FREQ_DECI_GHZ {
            let c = config(CoreKind::Big, f64::from(f_big) / 10.0, 0.8);
            let cost = evaluate(&v, &c, &p).unwrap();
            assert!(cost.load_time_s < last_time);
            last_time = cost.load_time_s;

            let f = f64::from(f_big) / 10.0;
            let dynamic = p_active(CoreKind::Big, f, &p) - p.p_stat_big;
            assert!((dynamic - p.kappa_big * f.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_on_single_page_equals_page_ratio() {
        let p = CostModelParams::default();
        let v = page(300.0, 100.0, 500.0, 10.0);
        let c = config(CoreKind::Big, 1.0, 0.4);
        let sweep = fixed_config_sweep(std::slice::from_ref(&v), &[c], Metric::Energy, &p).unwrap();
        let ours = evaluate(&v, &c, &p).unwrap().energy_j;
        let base = evaluate(&v, &hmp_baseline(), &p).unwrap().energy_j;
        assert!((sweep[0].1 - ours / base).abs() < 1e-12);
    }

    #[test]
    fn oracle_aggregate_dominates_fixed_configs() {
        let p = CostModelParams::default();
        let corpus = vec![
            page(10.0, 5.0, 50.0, 3.0),
            page(300.0, 600.0, 2000.0, 9.0),
            page(4000.0, 100.0, 500.0, 18.0),
        ];
        for m in Metric::ALL {
            let mut oracle_log = 0.0;
            for v in &corpus {
                let (_, best) = oracle_best(v, m, &p).unwrap();
                let base = evaluate(v, &hmp_baseline(), &p).unwrap();
                oracle_log += (best.metric(m) / base.metric(m)).ln();
            }
            let oracle_ratio = (oracle_log / corpus.len() as f64).exp();
            let labels: Vec<ProcessorConfig> = corpus
                .iter()
                .map(|v| oracle_best(v, m, &p).unwrap().0)
                .collect();
            for (config, ratio) in fixed_config_sweep(&corpus, &labels, m, &p).unwrap() {
                assert!(
                    oracle_ratio <= ratio + 1e-12,
                    "{m}: oracle {oracle_ratio} vs fixed {config} {ratio}"
                );
            }
        }
    }

    #[test]
    fn config_display_and_json_round_trip() {
        let c = config(CoreKind::Big, 0.9, 0.4);
        assert_eq!(c.to_string(), "(big, 0.9, 0.4)");
        let json = serde_json::to_string(&c).unwrap();
        let back: ProcessorConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
        assert!(serde_json::from_str::<ProcessorConfig>(
            r#"{"render_core":"big","f_big_ghz":2.5,"f_little_ghz":0.4}"#
        )
        .is_err());
    }
}
