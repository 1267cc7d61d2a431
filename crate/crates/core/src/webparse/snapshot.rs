//! Incremental parser snapshots. The DOM grows as bytes arrive; each
//! snapshot re-parses the consumed prefix, which keeps the node count
//! monotone and makes the final snapshot identical to a one-shot parse.

use super::{parse_css_str, parse_html_bytes, DomTree, StyleRule};

/// Parser state visible after some prefix of the page has been consumed.
#[derive(Debug, Clone)]
pub struct DomSnapshot {
    pub tree: DomTree,
    pub styles: Vec<StyleRule>,
    /// Total HTML + CSS bytes consumed so far.
    pub bytes_consumed: usize,
}

/// Iterator over snapshots; see [`snapshot_stream`].
pub struct SnapshotStream<'a> {
    html: &'a [u8],
    css: &'a [u8],
    chunk_size: usize,
    consumed: usize,
    done: bool,
}

impl Iterator for SnapshotStream<'_> {
    type Item = DomSnapshot;

    fn next(&mut self) -> Option<DomSnapshot> {
        if self.done {
            return None;
        }
        self.consumed += self.chunk_size;
        let html_end = self.consumed.min(self.html.len());
        let css_end = self.consumed.min(self.css.len());
        if html_end == self.html.len() && css_end == self.css.len() {
            self.done = true;
        }
        let tree = parse_html_bytes(&self.html[..html_end]);
        let styles = parse_css_str(&String::from_utf8_lossy(&self.css[..css_end]));
        Some(DomSnapshot {
            tree,
            styles,
            bytes_consumed: html_end + css_end,
        })
    }
}

/// Streams the page in `chunk_size`-byte steps, consuming HTML and CSS in
/// parallel, and yields one snapshot per step. The last snapshot always
/// covers the full inputs; empty inputs yield a single empty snapshot.
pub fn snapshot_stream<'a>(html: &'a [u8], css: &'a [u8], chunk_size: usize) -> SnapshotStream<'a> {
    assert!(chunk_size >= 1, "chunk_size must be at least 1");
    SnapshotStream {
        html,
        css,
        chunk_size,
        consumed: 0,
        done: false,
    }
}
