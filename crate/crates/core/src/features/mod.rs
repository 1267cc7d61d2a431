//! Workload feature extraction and the feature-selection toolchain.
//!
//! Extraction first counts *everything* in the parsed page (every tag,
//! attribute, style property and selector kind) into a raw map, then
//! projects the fixed 73-feature schema out of it. The selection tooling
//! (correlation pruning, information gain ratio) works on arbitrary raw
//! maps so schemas can be re-derived on new corpora.

mod normalize;
mod schema;
mod select;

pub use normalize::NormalizationTable;
pub use schema::{
    FeatureDescriptor, FeatureGroup, FeatureSchema, FEATURE_COUNT, OTHER_DOM_NODES,
    OTHER_DOM_TREE_DEPTH, OTHER_PAGE_SIZE_KB, OTHER_STYLE_RULES, SCHEMA_VERSION,
};
pub use select::{
    correlation_matrix, information_gain_ratio, prune_correlated, CorrelationMatrix,
    FeatureMatrix,
};

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::webparse::{DomNode, DomTree, StyleRule};

/// Raw candidate features: qualified name to value. Holds whatever the page
/// contains; the schema projection picks the 73 that matter.
pub type RawFeatures = BTreeMap<String, f64>;

/// A page's feature values in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema_version: u32,
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl FeatureVector {
    pub fn zeros() -> Self {
        FeatureVector {
            schema_version: SCHEMA_VERSION,
            values: vec![0.0; FEATURE_COUNT],
            normalized: false,
        }
    }

    pub fn get(&self, schema: &FeatureSchema, qualified_name: &str) -> Option<f64> {
        schema.position(qualified_name).map(|i| self.values[i])
    }

    pub(crate) fn check_compatible(&self, schema: &FeatureSchema) -> Result<()> {
        schema.check_version(self.schema_version)?;
        if self.values.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Counts every tag, attribute, selector kind and style property in the
/// parsed page, plus the whole-page measures. Features absent from the page
/// are simply absent from the map (value 0 after projection).
pub fn extract_raw_features(tree: &DomTree, styles: &[StyleRule], page_kb: f64) -> RawFeatures {
    let mut raw = RawFeatures::new();

    fn visit(node: &DomNode, raw: &mut RawFeatures) {
        *raw.entry(format!("tag.{}", node.tag_name)).or_insert(0.0) += 1.0;
        for (attr, _) in &node.attributes {
            *raw.entry(format!("attr.{attr}")).or_insert(0.0) += 1.0;
        }
        for child in &node.children {
            visit(child, raw);
        }
    }
    for child in &tree.root.children {
        visit(child, &mut raw);
    }

    for rule in styles {
        for selector in &rule.selectors {
            *raw.entry(format!("selector.{}", selector.kind.name())).or_insert(0.0) += 1.0;
        }
        for (property, _) in &rule.declarations {
            for name in canonical_property_names(property) {
                *raw.entry(format!("property.{name}")).or_insert(0.0) += 1.0;
            }
        }
    }

    raw.insert(format!("other.{OTHER_DOM_TREE_DEPTH}"), tree.depth as f64);
    raw.insert(format!("other.{OTHER_DOM_NODES}"), tree.node_count as f64);
    raw.insert(format!("other.{OTHER_STYLE_RULES}"), styles.len() as f64);
    raw.insert(format!("other.{OTHER_PAGE_SIZE_KB}"), page_kb);
    raw
}

/// Maps an authored CSS property to the dotted feature naming. Hyphens
/// become dots; `border-image-*` lives under the background group; the
/// `background-repeat` shorthand counts for both axes.
fn canonical_property_names(property: &str) -> Vec<String> {
    let dotted = property.replace('-', ".");
    if dotted == "background.repeat" {
        return vec!["background.repeat.x".to_string(), "background.repeat.y".to_string()];
    }
    if let Some(rest) = dotted.strip_prefix("border.image.") {
        return vec![format!("background.border.image.{rest}")];
    }
    vec![dotted]
}

/// Selects and orders the schema features out of a raw map; raw features
/// not in the schema are dropped.
pub fn project(raw: &RawFeatures, schema: &FeatureSchema) -> FeatureVector {
    let values = schema
        .descriptors()
        .iter()
        .map(|d| raw.get(&d.qualified_name()).copied().unwrap_or(0.0))
        .collect();
    FeatureVector {
        schema_version: schema.version(),
        values,
        normalized: false,
    }
}

/// Extraction and projection in one step.
pub fn extract_vector(tree: &DomTree, styles: &[StyleRule], page_kb: f64) -> FeatureVector {
    project(&extract_raw_features(tree, styles, page_kb), FeatureSchema::standard())
}

/// Writes feature vectors as CSV: one header row of the 73 qualified schema
/// names, one row per page in the given order.
pub fn write_feature_csv(out: impl Write, vectors: &[FeatureVector]) -> Result<()> {
    let schema = FeatureSchema::standard();
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(schema.qualified_names())?;
    for v in vectors {
        v.check_compatible(schema)?;
        writer.write_record(v.values.iter().map(|x| format_value(*x)))?;
    }
    writer.flush()?;
    Ok(())
}

fn format_value(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}
