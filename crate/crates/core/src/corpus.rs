//! Synthetic page corpus: generation, the on-disk manifest, and page
//! loading. Generated pages are well-formed, draw their tag, attribute and
//! style vocabulary from the feature schema (plus assorted noise features),
//! and span roughly 4 to 8000 DOM nodes and 40 KB to 5 MB, log-uniformly.

use std::fs;
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract_vector, FeatureVector};
use crate::webparse::{parse_css_str, parse_html_bytes, DomTree, StyleRule};

/// One page entry in a corpus manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PageEntry {
    pub id: String,
    /// Directory relative to the corpus root.
    pub dir: String,
    pub bytes: u64,
}

/// Index of a page corpus on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    #[serde(skip)]
    pub root: PathBuf,
    pub pages: Vec<PageEntry>,
    /// Present when the corpus was generated synthetically.
    pub seed: Option<u64>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl CorpusManifest {
    pub fn load(root: &Path) -> Result<CorpusManifest> {
        let raw = fs::read(root.join(MANIFEST_FILE))?;
        let mut manifest: CorpusManifest = serde_json::from_slice(&raw)?;
        manifest.root = root.to_path_buf();
        manifest.validate()?;
        Ok(manifest)
    }

    /// Builds a manifest by scanning a directory of user-supplied pages:
    /// every direct subdirectory containing an `index.html`.
    pub fn scan(root: &Path) -> Result<CorpusManifest> {
        let mut pages = Vec::new();
        let mut dirs: Vec<PathBuf> = fs::read_dir(root)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        for dir in dirs {
            if !dir.join("index.html").is_file() {
                continue;
            }
            let id = dir
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Error::InvalidManifest(format!("bad page dir {dir:?}")))?
                .to_string();
            let bytes = page_bytes(&dir)?;
            pages.push(PageEntry {
                id: id.clone(),
                dir: id,
                bytes,
            });
        }
        let manifest = CorpusManifest {
            root: root.to_path_buf(),
            pages,
            seed: None,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(self.root.join(MANIFEST_FILE), json)?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.pages.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut ids: Vec<&str> = self.pages.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        let unique = {
            let mut v = ids.clone();
            v.dedup();
            v.len()
        };
        if unique != ids.len() {
            return Err(Error::InvalidManifest("duplicate page ids".into()));
        }
        for page in &self.pages {
            let dir = self.root.join(&page.dir);
            if !dir.join("index.html").is_file() {
                return Err(Error::MissingIndexHtml(dir));
            }
        }
        Ok(())
    }

    pub fn page_dir(&self, entry: &PageEntry) -> PathBuf {
        self.root.join(&entry.dir)
    }

    /// Loads every page, in manifest order.
    pub fn load_pages(&self) -> Result<Vec<LoadedPage>> {
        self.pages
            .iter()
            .map(|entry| LoadedPage::read(&self.page_dir(entry), &entry.id))
            .collect()
    }
}

fn page_bytes(dir: &Path) -> Result<u64> {
    let mut total = fs::metadata(dir.join("index.html"))?.len();
    for css in css_files(dir)? {
        total += fs::metadata(css)?.len();
    }
    Ok(total)
}

fn css_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "css") && p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

/// A page's raw bytes: `index.html` plus its stylesheets concatenated in
/// filename order.
#[derive(Debug, Clone)]
pub struct LoadedPage {
    pub id: String,
    pub html: Vec<u8>,
    pub css: Vec<u8>,
}

impl LoadedPage {
    pub fn read(dir: &Path, id: &str) -> Result<LoadedPage> {
        let index = dir.join("index.html");
        if !index.is_file() {
            return Err(Error::MissingIndexHtml(dir.to_path_buf()));
        }
        let html = fs::read(index)?;
        let mut css = Vec::new();
        for file in css_files(dir)? {
            css.extend_from_slice(&fs::read(file)?);
            css.push(b'\n');
        }
        Ok(LoadedPage {
            id: id.to_string(),
            html,
            css,
        })
    }

    pub fn page_kb(&self) -> f64 {
        (self.html.len() + self.css.len()) as f64 / 1024.0
    }

    pub fn parse(&self) -> (DomTree, Vec<StyleRule>) {
        let tree = parse_html_bytes(&self.html);
        let styles = parse_css_str(&String::from_utf8_lossy(&self.css));
        (tree, styles)
    }

    pub fn extract(&self) -> FeatureVector {
        let (tree, styles) = self.parse();
        extract_vector(&tree, &styles, self.page_kb())
    }
}

/// Size profile for corpus generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenProfile {
    pub min_nodes: u64,
    pub max_nodes: u64,
    pub min_kb: f64,
    pub max_kb: f64,
}

impl Default for GenProfile {
    fn default() -> Self {
        GenProfile {
            min_nodes: 4,
            max_nodes: 8000,
            min_kb: 40.0,
            max_kb: 5120.0,
        }
    }
}

/// In-memory content of one synthetic page.
#[derive(Debug, Clone)]
pub struct PageContent {
    pub html: String,
    pub css: String,
}

impl PageContent {
    pub fn total_bytes(&self) -> usize {
        self.html.len() + self.css.len()
    }
}

/// Writes an `n`-page synthetic corpus under `root`, one directory per
/// page, and saves its manifest. Byte-identical for identical seeds.
pub fn gen_corpus(root: &Path, n: usize, seed: u64, profile: &GenProfile) -> Result<CorpusManifest> {
    if n == 0 {
        return Err(Error::InvalidArgument("corpus size must be at least 1".into()));
    }
    fs::create_dir_all(root)?;
    let mut pages = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("page_{i:04}");
        let dir = root.join(&id);
        fs::create_dir_all(&dir)?;
        let content = synth_page(seed, i as u64, profile);
        fs::write(dir.join("index.html"), &content.html)?;
        fs::write(dir.join("style_0.css"), &content.css)?;
        pages.push(PageEntry {
            id: id.clone(),
            dir: id,
            bytes: content.total_bytes() as u64,
        });
    }
    let manifest = CorpusManifest {
        root: root.to_path_buf(),
        pages,
        seed: Some(seed),
    };
    manifest.save()?;
    Ok(manifest)
}

/// Synthesizes one page deterministically from (seed, index).
pub fn synth_page(seed: u64, index: u64, profile: &GenProfile) -> PageContent {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index));

    let target_nodes = log_uniform(&mut rng, profile.min_nodes as f64, profile.max_nodes as f64) as u64;
    let target_bytes = (log_uniform(&mut rng, profile.min_kb, profile.max_kb) * 1024.0) as usize;
    // style volume is drawn independently of structure so that the
    // rule-to-node mix varies across the corpus
    let target_rules = log_uniform(&mut rng, 2.0, 3000.0) as usize;

    let html_body = synth_body(&mut rng, target_nodes);
    let css = synth_css(&mut rng, target_rules);

    let mut html = String::with_capacity(html_body.len() + 512);
    html.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str("<link rel=\"stylesheet\" href=\"style_0.css\">\n<title>synthetic page</title>\n");
    html.push_str("</head>\n<body>\n");
    html.push_str(&html_body);
    html.push_str("</body>\n</html>\n");

    // pad with comment filler to hit the byte target without touching the
    // node or rule counts
    let structural = html.len() + css.len();
    if target_bytes > structural + 32 {
        let deficit = target_bytes - structural;
        let insert_at = html.rfind("</body>").unwrap_or(html.len());
        html.insert_str(insert_at, &filler_comment(&mut rng, deficit));
    }
    PageContent { html, css }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

const CONTAINER_TAGS: [(&str, u32); 6] = [
    ("div", 40),
    ("section", 10),
    ("nav", 5),
    ("ul", 10),
    ("p", 25),
    ("table", 6),
];

const LEAF_TAGS: [(&str, u32); 10] = [
    ("span", 20),
    ("a", 20),
    ("b", 6),
    ("i", 6),
    ("img", 12),
    ("br", 8),
    ("button", 4),
    ("h1", 2),
    ("h2", 4),
    ("h3", 4),
];

const WORDS: [&str; 12] = [
    "latency", "render", "layout", "cluster", "frequency", "battery", "page", "style", "node",
    "script", "cache", "frame",
];

fn pick_weighted(rng: &mut ChaCha8Rng, table: &[(&'static str, u32)]) -> &'static str {
    let total: u32 = table.iter().map(|(_, w)| w).sum();
    let mut roll = rng.gen_range(0..total);
    for (tag, weight) in table {
        if roll < *weight {
            return tag;
        }
        roll -= weight;
    }
    table[table.len() - 1].0
}

fn synth_body(rng: &mut ChaCha8Rng, target_nodes: u64) -> String {
    // per-page style knobs: how nested and how media-heavy the page is
    let push_bias = rng.gen_range(0.25..0.55);
    let media_bias = rng.gen_range(0.0..0.35);
    let max_depth = rng.gen_range(4..14);

    let mut out = String::new();
    let mut stack: Vec<&'static str> = Vec::new();
    let mut emitted = 2u64; // html + body count toward the node budget

    while emitted < target_nodes {
        let depth = stack.len();
        let roll: f64 = rng.gen();
        if depth > 0 && (roll < 0.20 || depth >= max_depth) {
            close_one(&mut out, &mut stack);
            continue;
        }
        if roll < 0.20 + push_bias {
            let tag = pick_weighted(rng, &CONTAINER_TAGS);
            open_tag(&mut out, rng, tag, depth);
            stack.push(tag);
            emitted += 1;
            // tables come with their fixed scaffolding
            if tag == "table" && emitted + 3 <= target_nodes {
                out.push_str("<tbody><tr><td>");
                stack.push("tbody");
                stack.push("tr");
                stack.push("td");
                emitted += 3;
            }
            if tag == "ul" && emitted < target_nodes {
                out.push_str("<li>");
                stack.push("li");
                emitted += 1;
            }
            continue;
        }
        // leaf
        let tag = if rng.gen_bool(media_bias) {
            if rng.gen_bool(0.85) {
                "img"
            } else {
                "iframe"
            }
        } else {
            pick_weighted(rng, &LEAF_TAGS)
        };
        emit_leaf(&mut out, rng, tag);
        emitted += 1;
    }
    while !stack.is_empty() {
        close_one(&mut out, &mut stack);
    }
    out
}

fn open_tag(out: &mut String, rng: &mut ChaCha8Rng, tag: &str, depth: usize) {
    out.push('<');
    out.push_str(tag);
    if rng.gen_bool(0.5) {
        out.push_str(&format!(" class=\"c{}\"", rng.gen_range(0..40)));
    }
    if rng.gen_bool(0.08) {
        out.push_str(&format!(" id=\"e{}\"", rng.gen_range(0..10_000)));
    }
    if rng.gen_bool(0.06) {
        out.push_str(" style=\"margin: 0\"");
    }
    if tag == "nav" && rng.gen_bool(0.5) {
        out.push_str(" role=\"navigation\"");
    }
    out.push('>');
    if depth < 3 {
        out.push('\n');
    }
}

fn emit_leaf(out: &mut String, rng: &mut ChaCha8Rng, tag: &str) {
    match tag {
        "img" => {
            out.push_str(&format!(
                "<img src=\"i{}.png\" alt=\"{}\" width=\"{}\" height=\"{}\">",
                rng.gen_range(0..100),
                WORDS[rng.gen_range(0..WORDS.len())],
                rng.gen_range(8..640),
                rng.gen_range(8..480),
            ));
        }
        "iframe" => {
            out.push_str(&format!("<iframe src=\"f{}.html\"></iframe>", rng.gen_range(0..10)));
        }
        "br" => out.push_str("<br>"),
        "a" => {
            out.push_str(&format!(
                "<a href=\"/p{}\"{}>{}</a>",
                rng.gen_range(0..500),
                if rng.gen_bool(0.2) { " target=\"_blank\"" } else { "" },
                WORDS[rng.gen_range(0..WORDS.len())]
            ));
        }
        _ => {
            out.push('<');
            out.push_str(tag);
            if rng.gen_bool(0.35) {
                out.push_str(&format!(" class=\"c{}\"", rng.gen_range(0..40)));
            }
            out.push('>');
            out.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
            out.push_str("</");
            out.push_str(tag);
            out.push('>');
        }
    }
}

fn close_one(out: &mut String, stack: &mut Vec<&'static str>) {
    let tag = stack.pop().expect("non-empty stack");
    out.push_str("</");
    out.push_str(tag);
    out.push('>');
    if stack.len() < 3 {
        out.push('\n');
    }
}

const CSS_PROPERTIES: [&str; 24] = [
    "color",
    "display",
    "float",
    "font-family",
    "font-size",
    "font-weight",
    "background-color",
    "background-image",
    "background-attachment",
    "background-clip",
    "background-size",
    "background-repeat",
    "background-repeat-x",
    "background-repeat-y",
    "border-image-repeat",
    "border-image-slice",
    "border-image-source",
    "border-image-width",
    "margin-top",
    "margin-right",
    "padding",
    "width",
    "height",
    "border",
];

const CSS_VALUES: [&str; 8] = ["none", "12px", "bold", "#204060", "left", "url(a.png)", "cover", "serif"];

const ELEMENT_NAMES: [&str; 8] = ["div", "p", "a", "li", "span", "table", "nav", "h2"];

fn synth_css(rng: &mut ChaCha8Rng, target_rules: usize) -> String {
    let mut out = String::from("/* synthetic stylesheet */\n");
    for _ in 0..target_rules {
        let selector = match rng.gen_range(0..100) {
            0..=44 => format!(".c{}", rng.gen_range(0..60)),
            45..=69 => ELEMENT_NAMES[rng.gen_range(0..ELEMENT_NAMES.len())].to_string(),
            70..=89 => format!(
                "{} {}",
                ELEMENT_NAMES[rng.gen_range(0..ELEMENT_NAMES.len())],
                ELEMENT_NAMES[rng.gen_range(0..ELEMENT_NAMES.len())]
            ),
            _ => format!("#e{}", rng.gen_range(0..10_000)),
        };
        out.push_str(&selector);
        out.push_str(" { ");
        for _ in 0..rng.gen_range(1..=4) {
            out.push_str(CSS_PROPERTIES[rng.gen_range(0..CSS_PROPERTIES.len())]);
            out.push_str(": ");
            out.push_str(CSS_VALUES[rng.gen_range(0..CSS_VALUES.len())]);
            out.push_str("; ");
        }
        out.push_str("}\n");
    }
    out
}

fn filler_comment(rng: &mut ChaCha8Rng, bytes: usize) -> String {
    let mut filler = String::with_capacity(bytes);
    filler.push_str("<!-- ");
    while filler.len() + 4 < bytes {
        filler.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
        filler.push(' ');
    }
    filler.push_str("-->");
    filler
}
