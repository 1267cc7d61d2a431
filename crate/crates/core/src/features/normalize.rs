//! Min-max normalization. The table is fitted on the training corpus and
//! reused at deployment, where unseen out-of-range values clamp to [0, 1].

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

use super::{FeatureSchema, FeatureVector};

/// Per-feature (min, max) recorded from the training corpus. Serializes as
/// a `{feature: {"min": .., "max": ..}}` map keyed by qualified name.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationTable {
    schema_version: u32,
    ranges: Vec<(f64, f64)>,
}

impl Serialize for NormalizationTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormalizationTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        NormalizationTable::from_json(&value).map_err(D::Error::custom)
    }
}

impl NormalizationTable {
    /// Fits per-feature min/max over raw training vectors.
    pub fn fit(vectors: &[FeatureVector]) -> Result<NormalizationTable> {
        let schema = FeatureSchema::standard();
        if vectors.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); schema.len()];
        for v in vectors {
            v.check_compatible(schema)?;
            for (range, &x) in ranges.iter_mut().zip(&v.values) {
                range.0 = range.0.min(x);
                range.1 = range.1.max(x);
            }
        }
        Ok(NormalizationTable {
            schema_version: schema.version(),
            ranges,
        })
    }

    /// Scales each value to (x - min) / (max - min), clamped to [0, 1].
    /// Degenerate ranges (min == max) map to 0.
    pub fn normalize(&self, v: &FeatureVector) -> Result<FeatureVector> {
        let schema = FeatureSchema::standard();
        v.check_compatible(schema)?;
        schema.check_version(self.schema_version)?;
        let values = self
            .ranges
            .iter()
            .zip(&v.values)
            .map(|(&(min, max), &x)| {
                if max > min {
                    ((x - min) / (max - min)).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(FeatureVector {
            schema_version: v.schema_version,
            values,
            normalized: true,
        })
    }

    pub fn range(&self, index: usize) -> (f64, f64) {
        self.ranges[index]
    }

    /// Serializes as `{feature: {"min": .., "max": ..}}` keyed by qualified
    /// feature name.
    pub fn to_json(&self) -> serde_json::Value {
        let schema = FeatureSchema::standard();
        let map: BTreeMap<String, serde_json::Value> = schema
            .descriptors()
            .iter()
            .zip(&self.ranges)
            .map(|(d, &(min, max))| {
                (d.qualified_name(), serde_json::json!({ "min": min, "max": max }))
            })
            .collect();
        serde_json::to_value(map).expect("map of numbers")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<NormalizationTable> {
        let schema = FeatureSchema::standard();
        let obj = value
            .as_object()
            .ok_or_else(|| Error::MalformedReport("normalization table is not an object".into()))?;
        let mut ranges = Vec::with_capacity(schema.len());
        for d in schema.descriptors() {
            let name = d.qualified_name();
            let entry = obj.get(&name).ok_or_else(|| {
                Error::MalformedReport(format!("normalization table missing feature {name}"))
            })?;
            let min = entry.get("min").and_then(serde_json::Value::as_f64);
            let max = entry.get("max").and_then(serde_json::Value::as_f64);
            match (min, max) {
                (Some(min), Some(max)) if min <= max => ranges.push((min, max)),
                _ => {
                    return Err(Error::MalformedReport(format!(
                        "normalization table has invalid range for {name}"
                    )))
                }
            }
        }
        Ok(NormalizationTable {
            schema_version: schema.version(),
            ranges,
        })
    }
}
