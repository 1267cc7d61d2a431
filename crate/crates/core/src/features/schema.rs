//! The fixed 73-feature schema: 24 HTML tags, 24 HTML attributes, 4 selector
//! patterns, 17 style properties and 4 whole-page measures. Order is part of
//! the schema and is versioned; vectors from different versions never mix.

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const FEATURE_COUNT: usize = 73;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureGroup {
    Tag,
    Attr,
    Selector,
    Property,
    Other,
}

impl FeatureGroup {
    pub fn prefix(self) -> &'static str {
        match self {
            FeatureGroup::Tag => "tag",
            FeatureGroup::Attr => "attr",
            FeatureGroup::Selector => "selector",
            FeatureGroup::Property => "property",
            FeatureGroup::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureDescriptor {
    pub group: FeatureGroup,
    pub name: &'static str,
}

impl FeatureDescriptor {
    /// Unique id used in CSV headers, JSON tables and raw feature maps,
    /// e.g. `tag.div`, `attr.href`, `property.font.family`.
    pub fn qualified_name(&self) -> String {
        format!("{}.{}", self.group.prefix(), self.name)
    }
}

const TAGS: [&str; 24] = [
    "a", "b", "br", "button", "div", "h1", "h2", "h3", "h4", "i", "iframe", "li", "link", "meta",
    "nav", "img", "noscript", "p", "script", "section", "span", "style", "table", "tbody",
];

const ATTRS: [&str; 24] = [
    "alt",
    "async",
    "border",
    "charset",
    "class",
    "height",
    "content",
    "href",
    "media",
    "method",
    "onclick",
    "placeholder",
    "property",
    "rel",
    "role",
    "style",
    "target",
    "type",
    "value",
    "background",
    "cellspacing",
    "width",
    "xmlns",
    "src",
];

const SELECTORS: [&str; 4] = ["class", "descendant", "element", "id"];

const PROPERTIES: [&str; 17] = [
    "background.attachment",
    "background.clip",
    "background.color",
    "background.image",
    "background.repeat.x",
    "background.repeat.y",
    "background.size",
    "background.border.image.repeat",
    "background.border.image.slice",
    "background.border.image.source",
    "background.border.image.width",
    "font.family",
    "font.size",
    "font.weight",
    "color",
    "display",
    "float",
];

pub const OTHER_DOM_TREE_DEPTH: &str = "dom_tree_depth";
pub const OTHER_DOM_NODES: &str = "dom_nodes";
pub const OTHER_STYLE_RULES: &str = "style_rules";
pub const OTHER_PAGE_SIZE_KB: &str = "page_size_kb";

const OTHERS: [&str; 4] = [
    OTHER_DOM_TREE_DEPTH,
    OTHER_DOM_NODES,
    OTHER_STYLE_RULES,
    OTHER_PAGE_SIZE_KB,
];

/// The versioned, ordered feature list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    descriptors: Vec<FeatureDescriptor>,
}

impl FeatureSchema {
    /// The shipped 73-feature schema.
    pub fn standard() -> &'static FeatureSchema {
        use std::sync::OnceLock;
        static SCHEMA: OnceLock<FeatureSchema> = OnceLock::new();
        SCHEMA.get_or_init(|| {
            let mut descriptors = Vec::with_capacity(FEATURE_COUNT);
            let groups: [(FeatureGroup, &[&'static str]); 5] = [
                (FeatureGroup::Tag, &TAGS),
                (FeatureGroup::Attr, &ATTRS),
                (FeatureGroup::Selector, &SELECTORS),
                (FeatureGroup::Property, &PROPERTIES),
                (FeatureGroup::Other, &OTHERS),
            ];
            for (group, names) in groups {
                descriptors.extend(names.iter().map(|name| FeatureDescriptor { group, name }));
            }
            debug_assert_eq!(descriptors.len(), FEATURE_COUNT);
            FeatureSchema { descriptors }
        })
    }

    pub fn version(&self) -> u32 {
        SCHEMA_VERSION
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.descriptors
    }

    pub fn descriptor(&self, index: usize) -> &FeatureDescriptor {
        &self.descriptors[index]
    }

    /// Ordered qualified names, e.g. for CSV headers.
    pub fn qualified_names(&self) -> Vec<String> {
        self.descriptors.iter().map(FeatureDescriptor::qualified_name).collect()
    }

    pub fn position(&self, qualified_name: &str) -> Option<usize> {
        self.descriptors
            .iter()
            .position(|d| d.qualified_name() == qualified_name)
    }

    /// Index of one of the whole-page features, e.g. [`OTHER_DOM_NODES`].
    pub fn other_index(&self, name: &str) -> usize {
        self.descriptors
            .iter()
            .position(|d| d.group == FeatureGroup::Other && d.name == name)
            .expect("known other-feature name")
    }

    pub fn check_version(&self, found: u32) -> Result<()> {
        if found == self.version() {
            Ok(())
        } else {
            Err(Error::SchemaMismatch {
                expected: self.version(),
                found,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_has_73_features() {
        let schema = FeatureSchema::standard();
        assert_eq!(schema.len(), 73);
        let tags = schema.descriptors().iter().filter(|d| d.group == FeatureGroup::Tag).count();
        let attrs = schema.descriptors().iter().filter(|d| d.group == FeatureGroup::Attr).count();
        let sels = schema
            .descriptors()
            .iter()
            .filter(|d| d.group == FeatureGroup::Selector)
            .count();
        let props = schema
            .descriptors()
            .iter()
            .filter(|d| d.group == FeatureGroup::Property)
            .count();
        let others = schema.descriptors().iter().filter(|d| d.group == FeatureGroup::Other).count();
        assert_eq!((tags, attrs, sels, props, others), (24, 24, 4, 17, 4));
    }

    #[test]
    fn qualified_names_are_unique() {
        let names = FeatureSchema::standard().qualified_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn tag_and_attr_style_are_distinct_features() {
        let schema = FeatureSchema::standard();
        let tag_style = schema.position("tag.style");
        let attr_style = schema.position("attr.style");
        assert!(tag_style.is_some());
        assert!(attr_style.is_some());
        assert_ne!(tag_style, attr_style);
    }

    #[test]
    fn em_is_not_in_schema() {
        assert!(FeatureSchema::standard().position("tag.em").is_none());
    }
}
