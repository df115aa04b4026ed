//! Line-oriented lowering of the Markdown body into classified blocks.
//!
//! Only the constructs the compiler cares about are recognised: ATX
//! headings, fenced code, ordered/bullet list items and bold
//! `Input:`/`Output:` labels. Everything else becomes a [`BlockKind::Paragraph`]
//! so every non-blank line ends up in exactly one block.

use serde::{Deserialize, Serialize};

use super::CRITICAL_MARKER;
use crate::diagnostics::{LineIndex, Span};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyBlock {
    #[serde(flatten)]
    pub kind: BlockKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "block", rename_all = "snake_case")]
pub enum BlockKind {
    Section {
        level: u8,
        title: String,
    },
    ProcedureStep {
        order: u32,
        text: String,
        critical_marker: bool,
    },
    CodeBlock {
        language_tag: String,
        content: String,
    },
    ExamplePair {
        input_text: String,
        output_text: String,
    },
    SchemaBlock {
        raw_json_text: String,
    },
    Paragraph {
        text: String,
    },
}

/// Which roles the enclosing heading gives to its content.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SectionRoles {
    pub procedure: bool,
    pub schema: bool,
    pub example: bool,
    pub constraint: bool,
}

impl SectionRoles {
    pub(crate) fn from_title(title: &str) -> Self {
        let t = title.to_lowercase();
        SectionRoles {
            procedure: t.contains("procedure"),
            schema: t.contains("schema"),
            example: t.contains("example"),
            constraint: t.contains("constraint"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Line<'a> {
    start: usize,
    end: usize,
    text: &'a str,
}

impl Line<'_> {
    fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }

    fn indent(&self) -> usize {
        self.text.len() - self.text.trim_start_matches([' ', '\t']).len()
    }
}

fn split_lines(text: &str, from: usize) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    let mut start = from;
    while start < text.len() {
        let (end, next) = match text[start..].find('\n') {
            Some(i) => (start + i, start + i + 1),
            None => (text.len(), text.len()),
        };
        let content_end = if text[start..end].ends_with('\r') {
            end - 1
        } else {
            end
        };
        lines.push(Line {
            start,
            end: content_end,
            text: &text[start..content_end],
        });
        start = next;
    }
    lines
}

fn heading(line: &str) -> Option<(u8, String)> {
    let indent = line.len() - line.trim_start_matches(' ').len();
    if indent > 3 {
        return None;
    }
    let rest = &line[indent..];
    let hashes = rest.len() - rest.trim_start_matches('#').len();
    if !(1..=6).contains(&hashes) {
        return None;
    }
    let after = &rest[hashes..];
    if !after.is_empty() && !after.starts_with([' ', '\t']) {
        return None;
    }
    let mut title = after.trim();
    let stripped = title.trim_end_matches('#');
    if stripped.is_empty() || stripped.ends_with([' ', '\t']) {
        title = stripped.trim_end();
    }
    Some((hashes as u8, title.to_owned()))
}

struct Fence {
    ch: char,
    len: usize,
    info: String,
}

fn fence_open(line: &str) -> Option<Fence> {
    let t = line.trim_start();
    let ch = t.chars().next().filter(|c| *c == '`' || *c == '~')?;
    let len = t.len() - t.trim_start_matches(ch).len();
    if len < 3 {
        return None;
    }
    let info = t[len..].trim();
    if ch == '`' && info.contains('`') {
        return None;
    }
    Some(Fence {
        ch,
        len,
        info: info.to_owned(),
    })
}

fn fence_closes(line: &str, fence: &Fence) -> bool {
    let t = line.trim();
    let run = t.len() - t.trim_start_matches(fence.ch).len();
    run >= fence.len && run == t.len()
}

fn ordered_item(line: &str) -> Option<&str> {
    let t = line.trim_start_matches([' ', '\t']);
    let digits = t.len() - t.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 || digits > 9 {
        return None;
    }
    let after = &t[digits..];
    let after = after.strip_prefix(['.', ')'])?;
    if after.is_empty() {
        return Some("");
    }
    after.starts_with([' ', '\t']).then(|| after.trim())
}

fn bullet_item(line: &str) -> Option<&str> {
    let t = line.trim_start_matches([' ', '\t']);
    let after = t.strip_prefix(['-', '*', '+'])?;
    if after.is_empty() {
        return Some("");
    }
    after.starts_with([' ', '\t']).then(|| after.trim())
}

/// Matches `**Input:**`, `**Input**:` (optionally as a bullet item) and
/// returns the text after the label.
fn label<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    let mut t = line.trim_start();
    if let Some(rest) = bullet_item(t) {
        t = rest;
    }
    let rest = t.strip_prefix("**")?;
    if rest.len() < name.len() || !rest.is_char_boundary(name.len()) {
        return None;
    }
    let (word, rest) = rest.split_at(name.len());
    if !word.eq_ignore_ascii_case(name) {
        return None;
    }
    let rest = rest
        .strip_prefix(":**")
        .or_else(|| rest.strip_prefix("**:"))?;
    Some(rest.trim())
}

fn is_any_label(line: &str) -> bool {
    label(line, "input").is_some() || label(line, "output").is_some()
}

struct Lowerer<'a> {
    source: &'a str,
    index: LineIndex,
    lines: Vec<Line<'a>>,
    blocks: Vec<BodyBlock>,
    roles: SectionRoles,
    step: u32,
}

impl<'a> Lowerer<'a> {
    fn push(&mut self, kind: BlockKind, first: usize, last: usize) {
        let start = self.lines[first].start;
        let end = self.lines[last].end;
        let span = self.index.span(self.source, start, end);
        self.blocks.push(BodyBlock { kind, span });
    }

    fn raw(&self, first: usize, last: usize) -> String {
        self.lines[first..=last]
            .iter()
            .filter(|l| !l.is_blank())
            .map(|l| l.text)
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn next_non_blank(&self, from: usize) -> Option<usize> {
        (from..self.lines.len()).find(|&k| !self.lines[k].is_blank())
    }

    /// Returns the index of the last line of the fenced block opened at `i`.
    fn fence_end(&self, i: usize, fence: &Fence) -> usize {
        (i + 1..self.lines.len())
            .find(|&k| fence_closes(self.lines[k].text, fence))
            .unwrap_or(self.lines.len() - 1)
    }

    fn fence_content(&self, i: usize, last: usize, fence: &Fence) -> String {
        let closed = last > i && fence_closes(self.lines[last].text, fence);
        let body_end = if closed { last } else { last + 1 };
        self.lines[i + 1..body_end.max(i + 1)]
            .iter()
            .map(|l| l.text)
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Last line of the list item starting at `i`.
    fn item_end(&self, i: usize) -> usize {
        let item_indent = self.lines[i].indent();
        let mut last = i;
        let mut j = i + 1;
        while j < self.lines.len() {
            let line = self.lines[j];
            if line.is_blank() {
                match self.next_non_blank(j) {
                    Some(k)
                        if self.lines[k].indent() >= item_indent + 2
                            && fence_open(self.lines[k].text).is_none()
                            && heading(self.lines[k].text).is_none() =>
                    {
                        j = k;
                        continue;
                    }
                    _ => break,
                }
            }
            if heading(line.text).is_some() || fence_open(line.text).is_some() {
                break;
            }
            let sibling = ordered_item(line.text).is_some() || bullet_item(line.text).is_some();
            if sibling && line.indent() <= item_indent {
                break;
            }
            if self.roles.example && is_any_label(line.text) {
                break;
            }
            last = j;
            j += 1;
        }
        last
    }

    fn paragraph_end(&self, i: usize) -> usize {
        let mut last = i;
        for j in i + 1..self.lines.len() {
            let t = self.lines[j].text;
            if self.lines[j].is_blank()
                || heading(t).is_some()
                || fence_open(t).is_some()
                || ordered_item(t).is_some()
                || bullet_item(t).is_some()
                || (self.roles.example && is_any_label(t))
            {
                break;
            }
            last = j;
        }
        last
    }

    /// Text of a labelled example segment starting at line `i`, plus its last line.
    fn segment(&self, i: usize, first_text: &str) -> (String, usize) {
        if first_text.is_empty() && i + 1 < self.lines.len() {
            if let Some(fence) = fence_open(self.lines[i + 1].text) {
                let last = self.fence_end(i + 1, &fence);
                return (self.fence_content(i + 1, last, &fence), last);
            }
        }
        let mut parts = vec![first_text.to_owned()];
        let mut last = i;
        for j in i + 1..self.lines.len() {
            let t = self.lines[j].text;
            if self.lines[j].is_blank()
                || heading(t).is_some()
                || fence_open(t).is_some()
                || is_any_label(t)
            {
                break;
            }
            parts.push(t.trim().to_owned());
            last = j;
        }
        let text = parts
            .into_iter()
            .filter(|p| !p.is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        (text, last)
    }

    fn run(mut self) -> Vec<BodyBlock> {
        let mut i = 0;
        while i < self.lines.len() {
            let line = self.lines[i];
            if line.is_blank() {
                i += 1;
                continue;
            }
            if let Some((level, title)) = heading(line.text) {
                self.roles = SectionRoles::from_title(&title);
                self.step = 0;
                self.push(BlockKind::Section { level, title }, i, i);
                i += 1;
                continue;
            }
            if let Some(fence) = fence_open(line.text) {
                let last = self.fence_end(i, &fence);
                let content = self.fence_content(i, last, &fence);
                let language_tag = fence
                    .info
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_owned();
                let kind = if self.roles.schema && language_tag.eq_ignore_ascii_case("json") {
                    BlockKind::SchemaBlock {
                        raw_json_text: content,
                    }
                } else {
                    BlockKind::CodeBlock {
                        language_tag,
                        content,
                    }
                };
                self.push(kind, i, last);
                i = last + 1;
                continue;
            }
            if self.roles.example {
                if let Some(first) = label(line.text, "input") {
                    let (input_text, input_last) = self.segment(i, first);
                    let output = self
                        .next_non_blank(input_last + 1)
                        .and_then(|k| label(self.lines[k].text, "output").map(|t| (k, t)));
                    if let Some((k, first_out)) = output {
                        let (output_text, last) = self.segment(k, first_out);
                        self.push(
                            BlockKind::ExamplePair {
                                input_text,
                                output_text,
                            },
                            i,
                            last,
                        );
                        i = last + 1;
                    } else {
                        let text = self.raw(i, input_last);
                        self.push(BlockKind::Paragraph { text }, i, input_last);
                        i = input_last + 1;
                    }
                    continue;
                }
            }
            if let Some(first) = ordered_item(line.text) {
                let last = self.item_end(i);
                if self.roles.procedure && !first.is_empty() {
                    let joined = std::iter::once(first)
                        .chain(self.lines[i + 1..=last].iter().map(|l| l.text.trim()))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let critical_marker = joined.contains(CRITICAL_MARKER);
                    let text = joined
                        .replace(CRITICAL_MARKER, " ")
                        .split_whitespace()
                        .collect::<Vec<_>>()
                        .join(" ");
                    if !text.is_empty() {
                        self.step += 1;
                        let kind = BlockKind::ProcedureStep {
                            order: self.step,
                            text,
                            critical_marker,
                        };
                        self.push(kind, i, last);
                        i = last + 1;
                        continue;
                    }
                }
                let text = self.raw(i, last);
                self.push(BlockKind::Paragraph { text }, i, last);
                i = last + 1;
                continue;
            }
            let last = if bullet_item(line.text).is_some() {
                self.item_end(i)
            } else {
                self.paragraph_end(i)
            };
            let text = self.raw(i, last);
            self.push(BlockKind::Paragraph { text }, i, last);
            i = last + 1;
        }
        self.blocks
    }
}

/// Lowers `source[body_offset..]`; spans are absolute offsets into `source`.
pub(crate) fn lower_body(source: &str, body_offset: usize) -> Vec<BodyBlock> {
    Lowerer {
        source,
        index: LineIndex::new(source),
        lines: split_lines(source, body_offset),
        blocks: Vec::new(),
        roles: SectionRoles::default(),
        step: 0,
    }
    .run()
}

/// Lowers a standalone Markdown body; spans are relative to `body`.
pub fn lower_markdown(body: &str) -> Vec<BodyBlock> {
    lower_body(body, 0)
}
