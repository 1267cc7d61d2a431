//! Tolerant CSS parser. Recovers every rule whose selector and declaration
//! block are syntactically intact; at-rules and malformed declarations are
//! skipped rather than failing the stylesheet.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// The four selector shapes counted as workload features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorKind {
    Class,
    Id,
    Element,
    Descendant,
}

impl SelectorKind {
    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Class => "class",
            SelectorKind::Id => "id",
            SelectorKind::Element => "element",
            SelectorKind::Descendant => "descendant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorPattern {
    pub kind: SelectorKind,
    pub raw: String,
}

impl SelectorPattern {
    /// Deterministic total classification: anything with a combinator is a
    /// descendant pattern, otherwise the leading token decides. Compound
    /// selectors like `div.a` classify by the leading token.
    pub fn classify(raw: &str) -> SelectorKind {
        if raw.contains(char::is_whitespace) || raw.contains('>') {
            SelectorKind::Descendant
        } else if raw.starts_with('#') {
            SelectorKind::Id
        } else if raw.starts_with('.') {
            SelectorKind::Class
        } else {
            SelectorKind::Element
        }
    }

    fn new(raw: &str) -> Self {
        SelectorPattern {
            kind: Self::classify(raw),
            raw: raw.to_string(),
        }
    }
}

/// One style rule: a selector list and its property declarations.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleRule {
    pub selectors: Vec<SelectorPattern>,
    /// (property, value) pairs; property names are lowercased.
    pub declarations: Vec<(String, String)>,
}

/// Parses a stylesheet, returning every recoverable rule.
pub fn parse_css_str(src: &str) -> Vec<StyleRule> {
    let src = strip_comments(src);
    let bytes = src.as_bytes();
    let mut rules = Vec::new();
    let mut pos = 0;

    while pos < bytes.len() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] == b'@' {
            skip_at_rule(bytes, &mut pos);
            continue;
        }
        if bytes[pos] == b'}' || bytes[pos] == b'{' {
            // stray brace
            pos += 1;
            continue;
        }
        let sel_start = pos;
        while pos < bytes.len() && bytes[pos] != b'{' && bytes[pos] != b'}' {
            pos += 1;
        }
        if pos >= bytes.len() || bytes[pos] == b'}' {
            // selector text with no block; drop it
            pos = (pos + 1).min(bytes.len());
            continue;
        }
        let selector_text = &src[sel_start..pos];
        pos += 1; // consume `{`
        let block_start = pos;
        let mut brace_depth = 1usize;
        while pos < bytes.len() && brace_depth > 0 {
            match bytes[pos] {
                b'{' => brace_depth += 1,
                b'}' => brace_depth -= 1,
                _ => {}
            }
            pos += 1;
        }
        let block_end = if brace_depth == 0 { pos - 1 } else { pos };
        let selectors: Vec<SelectorPattern> = selector_text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(SelectorPattern::new)
            .collect();
        if selectors.is_empty() {
            continue;
        }
        rules.push(StyleRule {
            selectors,
            declarations: parse_declarations(&src[block_start..block_end]),
        });
    }
    rules
}

/// Reads a full CSS stream and parses it. Errors only on read failure.
pub fn parse_css(mut reader: impl Read) -> Result<Vec<StyleRule>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    Ok(parse_css_str(&String::from_utf8_lossy(&bytes)))
}

fn parse_declarations(block: &str) -> Vec<(String, String)> {
    block
        .split(';')
        .filter_map(|decl| {
            let (prop, value) = decl.split_once(':')?;
            let prop = prop.trim().to_ascii_lowercase();
            if prop.is_empty() {
                return None;
            }
            Some((prop, value.trim().to_string()))
        })
        .collect()
}

/// Skips `@media { ... }` style at-rules (brace-balanced) and `@import ...;`
/// style ones (to the semicolon).
fn skip_at_rule(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos] != b'{' && bytes[*pos] != b';' {
        *pos += 1;
    }
    if *pos >= bytes.len() {
        return;
    }
    if bytes[*pos] == b';' {
        *pos += 1;
        return;
    }
    let mut depth = 0usize;
    while *pos < bytes.len() {
        match bytes[*pos] {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    *pos += 1;
                    return;
                }
            }
            _ => {}
        }
        *pos += 1;
    }
}

fn strip_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        match rest[start + 2..].find("*/") {
            Some(end) => rest = &rest[start + 2 + end + 2..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_rule() {
        let rules = parse_css_str(".a { color: red }");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].selectors[0].kind, SelectorKind::Class);
        assert_eq!(
            rules[0].declarations,
            vec![("color".to_string(), "red".to_string())]
        );
    }

    #[test]
    fn descendant_rule() {
        let rules = parse_css_str("div p { float: left }");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].selectors[0].kind, SelectorKind::Descendant);
    }

    #[test]
    fn selector_list_keeps_one_rule() {
        let rules = parse_css_str("#x, li { display: none }");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].selectors.len(), 2);
        assert_eq!(rules[0].selectors[0].kind, SelectorKind::Id);
        assert_eq!(rules[0].selectors[1].kind, SelectorKind::Element);
        assert_eq!(rules[0].declarations.len(), 1);
    }

    #[test]
    fn classification_is_total() {
        assert_eq!(SelectorPattern::classify("div.a"), SelectorKind::Element);
        assert_eq!(SelectorPattern::classify("a > b"), SelectorKind::Descendant);
        assert_eq!(SelectorPattern::classify(".x.y"), SelectorKind::Class);
        assert_eq!(SelectorPattern::classify("#main"), SelectorKind::Id);
        assert_eq!(SelectorPattern::classify("*"), SelectorKind::Element);
    }

    #[test]
    fn at_rules_are_skipped() {
        let rules = parse_css_str(
            "@import url(x.css); @media screen { .hidden { display: none } } b { font-weight: bold }",
        );
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].selectors[0].raw, "b");
    }

    #[test]
    fn malformed_declarations_are_dropped() {
        let rules = parse_css_str("p { color red; font-size: 10px; ; }");
        assert_eq!(rules.len(), 1);
        assert_eq!(
            rules[0].declarations,
            vec![("font-size".to_string(), "10px".to_string())]
        );
    }

    #[test]
    fn unclosed_block_recovers_parsed_declarations() {
        let rules = parse_css_str("p { color: red; font-size: 10px");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].declarations.len(), 2);
    }

    #[test]
    fn property_names_case_fold() {
        let rules = parse_css_str("p { COLOR: Red }");
        assert_eq!(rules[0].declarations[0].0, "color");
        assert_eq!(rules[0].declarations[0].1, "Red");
    }

    #[test]
    fn comments_are_stripped() {
        let rules = parse_css_str("/* hi */ p { /* x */ color: red }");
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].declarations.len(), 1);
    }
}
