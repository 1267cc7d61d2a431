//! Tolerant parsing of HTML and CSS into the structures the feature
//! extractor counts over: a DOM tree of element nodes and a flat list of
//! style rules. Layout, paint, scripting and network fetching are out of
//! scope; parsing never fails on malformed markup.

mod css;
mod html;
mod snapshot;

pub use css::{parse_css, parse_css_str, SelectorKind, SelectorPattern, StyleRule};
pub use snapshot::{snapshot_stream, DomSnapshot, SnapshotStream};

use std::io::Read;

use crate::error::Result;

/// A single element node. Text content is not retained; only structure
/// matters for workload characterization.
#[derive(Debug, Clone, PartialEq)]
pub struct DomNode {
    /// Lowercased tag name. The synthetic document root uses `#document`.
    pub tag_name: String,
    /// Attributes in source order, names lowercased, values verbatim.
    pub attributes: Vec<(String, String)>,
    pub children: Vec<DomNode>,
}

impl DomNode {
    pub(crate) fn new(tag_name: String) -> Self {
        DomNode {
            tag_name,
            attributes: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Number of element nodes in this subtree, excluding the synthetic root.
    fn element_count(&self) -> usize {
        let own = usize::from(self.tag_name != ROOT_TAG);
        own + self.children.iter().map(DomNode::element_count).sum::<usize>()
    }

    /// Longest chain of element nodes from here down, excluding the
    /// synthetic root. An empty document has depth 0.
    fn element_depth(&self) -> usize {
        let below = self.children.iter().map(DomNode::element_depth).max().unwrap_or(0);
        if self.tag_name == ROOT_TAG {
            below
        } else {
            1 + below
        }
    }

    fn write_html(&self, out: &mut String) {
        if self.tag_name != ROOT_TAG {
            out.push('<');
            out.push_str(&self.tag_name);
            for (name, value) in &self.attributes {
                out.push(' ');
                out.push_str(name);
                out.push_str("=\"");
                out.push_str(value);
                out.push('"');
            }
            out.push('>');
        }
        for child in &self.children {
            child.write_html(out);
        }
        if self.tag_name != ROOT_TAG && !html::is_void_element(&self.tag_name) {
            out.push_str("</");
            out.push_str(&self.tag_name);
            out.push('>');
        }
    }
}

pub(crate) const ROOT_TAG: &str = "#document";

/// A parsed document: synthetic root plus derived counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DomTree {
    pub root: DomNode,
    /// Element nodes reachable from the root (the root itself is not counted).
    pub node_count: usize,
    /// Longest element chain; 0 for an empty document.
    pub depth: usize,
    /// Size of the HTML source in kilobytes.
    pub source_kb: f64,
}

impl DomTree {
    fn from_root(root: DomNode, source_bytes: usize) -> Self {
        let node_count = root.element_count();
        let depth = root.element_depth();
        DomTree {
            root,
            node_count,
            depth,
            source_kb: source_bytes as f64 / 1024.0,
        }
    }

    /// Serializes the tree back to markup. Re-parsing the output of a
    /// well-formed fixture yields an identical tree.
    pub fn to_html(&self) -> String {
        let mut out = String::new();
        self.root.write_html(&mut out);
        out
    }
}

/// Counters for recovery actions taken while parsing malformed markup.
/// Well-formed input parses with all counters at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    /// Elements force-closed because of a mismatched or missing close tag,
    /// close tags that matched nothing, and constructs truncated by EOF.
    pub recovery_events: usize,
}

/// Parses HTML bytes into a [`DomTree`]. Never fails: malformed markup is
/// recovered tag-soup style.
pub fn parse_html_bytes(bytes: &[u8]) -> DomTree {
    parse_html_bytes_with_stats(bytes).0
}

/// Like [`parse_html_bytes`] but also reports recovery statistics.
pub fn parse_html_bytes_with_stats(bytes: &[u8]) -> (DomTree, ParseStats) {
    let text = String::from_utf8_lossy(bytes);
    let (root, stats) = html::parse_document(&text);
    (DomTree::from_root(root, bytes.len()), stats)
}

/// Reads a full HTML stream and parses it. Errors only on read failure.
pub fn parse_html(mut reader: impl Read) -> Result<DomTree> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    Ok(parse_html_bytes(&bytes))
}
