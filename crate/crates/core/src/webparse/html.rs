//! Stack-based tag-soup HTML parser. Recovers from misnested and unclosed
//! tags instead of rejecting input; the full HTML5 tree-construction
//! algorithm is intentionally not implemented.

use super::{DomNode, ParseStats, ROOT_TAG};

/// Elements that never take children and have no close tag.
const VOID_ELEMENTS: [&str; 5] = ["br", "img", "meta", "link", "input"];

/// Elements whose content is opaque text (never parsed as markup).
const RAW_TEXT_ELEMENTS: [&str; 2] = ["script", "style"];

pub(super) fn is_void_element(tag: &str) -> bool {
    VOID_ELEMENTS.contains(&tag)
}

fn is_raw_text_element(tag: &str) -> bool {
    RAW_TEXT_ELEMENTS.contains(&tag)
}

struct Scanner<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn eof(&self) -> bool {
        self.pos >= self.input.len()
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.input[self.pos..].starts_with(s)
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Advances past the next occurrence of `needle`, matching ASCII
    /// case-insensitively (needles are lowercase). Returns false if EOF hit
    /// first. Works on bytes: ASCII needles never match inside a multi-byte
    /// UTF-8 sequence, so the position stays on a char boundary.
    fn skip_past(&mut self, needle: &str) -> bool {
        let needle = needle.as_bytes();
        let haystack = &self.input.as_bytes()[self.pos..];
        let mut i = 0;
        while i + needle.len() <= haystack.len() {
            if haystack[i..i + needle.len()]
                .iter()
                .zip(needle)
                .all(|(h, n)| h.to_ascii_lowercase() == *n)
            {
                self.pos += i + needle.len();
                return true;
            }
            i += 1;
        }
        self.pos = self.input.len();
        false
    }
}

enum Token {
    Open {
        name: String,
        attributes: Vec<(String, String)>,
        self_closing: bool,
    },
    Close(String),
}

/// Reads one token starting at `<`. Returns None for non-token constructs
/// (comments, doctype, processing instructions, stray `<`) and on EOF
/// inside an unfinished construct; `truncated` reports the EOF case so the
/// caller can count it as a recovery.
fn next_token(sc: &mut Scanner, truncated: &mut bool) -> Option<Token> {
    debug_assert_eq!(sc.peek(), Some('<'));
    sc.bump();
    match sc.peek() {
        Some('!') => {
            if sc.starts_with("!--") {
                sc.pos += 3;
                if !sc.skip_past("-->") {
                    *truncated = true;
                }
            } else if !sc.skip_past(">") {
                *truncated = true;
            }
            None
        }
        Some('?') => {
            if !sc.skip_past(">") {
                *truncated = true;
            }
            None
        }
        Some('/') => {
            sc.bump();
            if !matches!(sc.peek(), Some(c) if c.is_ascii_alphabetic()) {
                // bogus close tag, skip to `>`
                if !sc.skip_past(">") {
                    *truncated = true;
                }
                return None;
            }
            let name = scan_name(sc);
            if !sc.skip_past(">") {
                *truncated = true;
                return None;
            }
            Some(Token::Close(name))
        }
        Some(c) if c.is_ascii_alphabetic() => {
            let name = scan_name(sc);
            let mut attributes = Vec::new();
            let mut self_closing = false;
            loop {
                sc.skip_whitespace();
                match sc.peek() {
                    None => {
                        // EOF inside a tag: drop the whole token
                        *truncated = true;
                        return None;
                    }
                    Some('>') => {
                        sc.bump();
                        break;
                    }
                    Some('/') => {
                        sc.bump();
                        if sc.peek() == Some('>') {
                            sc.bump();
                            self_closing = true;
                            break;
                        }
                    }
                    Some(_) => {
                        if let Some(attr) = scan_attribute(sc) {
                            attributes.push(attr);
                        }
                    }
                }
            }
            Some(Token::Open {
                name,
                attributes,
                self_closing,
            })
        }
        // stray `<` is text
        _ => None,
    }
}

fn scan_name(sc: &mut Scanner) -> String {
    let mut name = String::new();
    while let Some(c) = sc.peek() {
        if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == ':' {
            name.push(c.to_ascii_lowercase());
            sc.bump();
        } else {
            break;
        }
    }
    name
}

fn scan_attribute(sc: &mut Scanner) -> Option<(String, String)> {
    let mut name = String::new();
    while let Some(c) = sc.peek() {
        if c.is_whitespace() || c == '=' || c == '>' || c == '/' {
            break;
        }
        name.push(c.to_ascii_lowercase());
        sc.bump();
    }
    if name.is_empty() {
        sc.bump();
        return None;
    }
    sc.skip_whitespace();
    if sc.peek() != Some('=') {
        return Some((name, String::new()));
    }
    sc.bump();
    sc.skip_whitespace();
    let mut value = String::new();
    match sc.peek() {
        Some(quote @ ('"' | '\'')) => {
            sc.bump();
            while let Some(c) = sc.bump() {
                if c == quote {
                    break;
                }
                value.push(c);
            }
        }
        _ => {
            while let Some(c) = sc.peek() {
                if c.is_whitespace() || c == '>' {
                    break;
                }
                value.push(c);
                sc.bump();
            }
        }
    }
    Some((name, value))
}

/// Parses a whole document into a tree under a synthetic root.
pub(super) fn parse_document(input: &str) -> (DomNode, ParseStats) {
    let mut sc = Scanner { input, pos: 0 };
    let mut stats = ParseStats::default();

    // Stack of open elements; index 0 is the synthetic root.
    let mut stack: Vec<DomNode> = vec![DomNode::new(ROOT_TAG.to_string())];

    while !sc.eof() {
        if sc.peek() != Some('<') {
            // text is skipped wholesale; only structure is kept
            match sc.input.as_bytes()[sc.pos..].iter().position(|&b| b == b'<') {
                Some(off) => sc.pos += off,
                None => break,
            }
            continue;
        }
        let mut truncated = false;
        let token = next_token(&mut sc, &mut truncated);
        if truncated {
            stats.recovery_events += 1;
        }
        match token {
            Some(Token::Open {
                name,
                attributes,
                self_closing,
            }) => {
                let mut node = DomNode::new(name.clone());
                node.attributes = attributes;
                let void = is_void_element(&name) || self_closing;
                if void {
                    stack.last_mut().expect("root").children.push(node);
                    continue;
                }
                if is_raw_text_element(&name) {
                    // consume opaque body up to the matching close tag
                    let close = format!("</{name}");
                    if !sc.skip_past(&close) || !sc.skip_past(">") {
                        stats.recovery_events += 1;
                    }
                    stack.last_mut().expect("root").children.push(node);
                    continue;
                }
                stack.push(node);
            }
            Some(Token::Close(name)) => {
                match stack.iter().rposition(|n| n.tag_name == name) {
                    // never pop the synthetic root
                    Some(idx) if idx > 0 => {
                        // misnested opens between here and the match are
                        // force-closed
                        stats.recovery_events += stack.len() - idx - 1;
                        while stack.len() > idx {
                            let done = stack.pop().expect("idx > 0");
                            stack.last_mut().expect("parent").children.push(done);
                        }
                    }
                    _ => stats.recovery_events += 1,
                }
            }
            None => {}
        }
    }

    // unclosed elements at EOF
    stats.recovery_events += stack.len() - 1;
    while stack.len() > 1 {
        let done = stack.pop().expect("len > 1");
        stack.last_mut().expect("parent").children.push(done);
    }
    (stack.pop().expect("root"), stats)
}
