//! Text-level helpers shared by the built-in emitters.

use std::fmt::Write as _;

use super::RenderError;
use crate::frontend::CRITICAL_MARKER;
use crate::ir::{CodeSnippet, Permission, SchemaNode, SkillIR};

/// One-line banner for skills that need human confirmation.
pub(crate) fn security_banner(ir: &SkillIR) -> Option<String> {
    ir.security_level.requires_hitl().then(|| {
        format!(
            "<!-- security_level: {}; human-in-the-loop confirmation required -->\n",
            ir.security_level
        )
    })
}

fn xml_char_allowed(c: char) -> bool {
    !((c < ' ' && !matches!(c, '\t' | '\n' | '\r')) || matches!(c, '\u{fffe}' | '\u{ffff}'))
}

fn escape(field: &str, text: &str, attr: bool) -> Result<String, RenderError> {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#xD;"),
            '"' if attr => out.push_str("&quot;"),
            '\n' if attr => out.push_str("&#xA;"),
            '\t' if attr => out.push_str("&#x9;"),
            c if !xml_char_allowed(c) => {
                return Err(RenderError::new(
                    field,
                    format!("U+{:04X} cannot be represented in XML", c as u32),
                ))
            }
            c => out.push(c),
        }
    }
    Ok(out)
}

/// Escapes character data.
pub(crate) fn xml_text(field: &str, text: &str) -> Result<String, RenderError> {
    escape(field, text, false)
}

/// Escapes a double-quoted attribute value.
pub(crate) fn xml_attr(field: &str, text: &str) -> Result<String, RenderError> {
    escape(field, text, true)
}

fn longest_backtick_run(text: &str) -> usize {
    text.split(|c| c != '`').map(str::len).max().unwrap_or(0)
}

/// Inline code span that survives backticks in `text`.
pub(crate) fn code_span(text: &str) -> String {
    let run = longest_backtick_run(text);
    if run == 0 {
        return format!("`{text}`");
    }
    let ticks = "`".repeat(run + 1);
    format!("{ticks} {text} {ticks}")
}

fn is_yaml_tag(tag: &str) -> bool {
    tag.eq_ignore_ascii_case("yaml") || tag.eq_ignore_ascii_case("yml")
}

/// Fenced Markdown block. YAML-tagged snippets and unusable tags get an
/// untagged fence with a caption so the schema is the only tagged YAML fence.
pub(crate) fn fenced_snippet(out: &mut String, snippet: &CodeSnippet) {
    let tag = snippet.language.as_str();
    let usable = !tag.is_empty()
        && !is_yaml_tag(tag)
        && !tag
            .chars()
            .any(|c| c.is_whitespace() || c == '`' || c == '~');
    if !tag.is_empty() && !usable {
        let _ = writeln!(out, "Language: {}", code_span(tag));
        out.push('\n');
    }
    fence(out, if usable { tag } else { "" }, &snippet.content);
}

pub(crate) fn fence(out: &mut String, tag: &str, content: &str) {
    let ticks = "`".repeat(longest_backtick_run(content).max(2) + 1);
    let _ = writeln!(out, "{ticks}{tag}");
    out.push_str(content);
    if !content.is_empty() && !content.ends_with('\n') {
        out.push('\n');
    }
    let _ = writeln!(out, "{ticks}");
}

/// `1. text` lines with the critical marker appended where needed.
pub(crate) fn numbered_procedures(out: &mut String, ir: &SkillIR) {
    for step in &ir.procedures {
        let _ = write!(out, "{}. {}", step.order, step.instruction);
        if step.is_critical {
            let _ = write!(out, " {CRITICAL_MARKER}");
        }
        out.push('\n');
    }
}

pub(crate) fn permission_line(p: &Permission) -> String {
    format!(
        "{} {} ({})",
        p.kind.as_str(),
        code_span(&p.scope),
        if p.read_only {
            "read-only"
        } else {
            "read-write"
        }
    )
}

/// A listed schema node and its dotted path.
pub(crate) struct SchemaEntry<'a> {
    pub path: String,
    pub node: &'a SchemaNode,
}

impl SchemaEntry<'_> {
    pub(crate) fn display_path(&self) -> &str {
        if self.path.is_empty() {
            "(root)"
        } else {
            &self.path
        }
    }
}

/// Leaves, plus containers that carry a description, in preorder.
pub(crate) fn schema_entries(root: &SchemaNode) -> Vec<SchemaEntry<'_>> {
    fn walk<'a>(node: &'a SchemaNode, path: String, out: &mut Vec<SchemaEntry<'a>>) {
        if node.properties.is_empty() && node.items.is_none() {
            out.push(SchemaEntry { path, node });
            return;
        }
        if node.description.is_some() {
            out.push(SchemaEntry {
                path: path.clone(),
                node,
            });
        }
        for (name, child) in &node.properties {
            let p = if path.is_empty() {
                name.clone()
            } else {
                format!("{path}.{name}")
            };
            walk(child, p, out);
        }
        if let Some(items) = &node.items {
            walk(items, format!("{path}[]"), out);
        }
    }
    let mut out = Vec::new();
    walk(root, String::new(), &mut out);
    out
}

/// `(type, one of: ...)` plus `: description` when present.
pub(crate) fn describe_node(node: &SchemaNode) -> String {
    let mut s = format!("({}", node.kind);
    if let Some(values) = &node.enum_values {
        let list: Vec<_> = values.iter().map(|v| code_span(v)).collect();
        let _ = write!(s, ", one of: {}", list.join(", "));
    }
    s.push(')');
    if let Some(desc) = &node.description {
        let _ = write!(s, ": {desc}");
    }
    s
}

/// `- `path` (type): description` for every listed node.
pub(crate) fn dotted_schema_list(out: &mut String, root: &SchemaNode) {
    for entry in schema_entries(root) {
        let _ = writeln!(
            out,
            "- {} {}",
            code_span(entry.display_path()),
            describe_node(entry.node)
        );
    }
}

// YAML

const YAML_RESERVED: &[&str] = &[
    "true", "false", "yes", "no", "on", "off", "null", "y", "n", "~",
];

fn yaml_quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20
                || (0x7f..=0x9f).contains(&(c as u32))
                || matches!(c, '\u{2028}' | '\u{2029}' | '\u{fffe}' | '\u{ffff}') =>
            {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn yaml_key(key: &str) -> String {
    let plain = key
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !YAML_RESERVED.iter().any(|r| r.eq_ignore_ascii_case(key));
    if plain {
        key.to_owned()
    } else {
        yaml_quote(key)
    }
}

fn yaml_flow(node: &SchemaNode) -> String {
    let mut parts = vec![format!("type: {}", yaml_key(node.kind.as_str()))];
    if let Some(d) = &node.description {
        parts.push(format!("description: {}", yaml_quote(d)));
    }
    if let Some(values) = &node.enum_values {
        let list: Vec<_> = values.iter().map(|v| yaml_quote(v)).collect();
        parts.push(format!("enum: [{}]", list.join(", ")));
    }
    format!("{{ {} }}", parts.join(", "))
}

fn yaml_entry(out: &mut String, key: &str, node: &SchemaNode, indent: usize) {
    let pad = " ".repeat(indent);
    if node.properties.is_empty() && node.items.is_none() {
        let _ = writeln!(out, "{pad}{}: {}", yaml_key(key), yaml_flow(node));
    } else {
        let _ = writeln!(out, "{pad}{}:", yaml_key(key));
        yaml_body(out, node, indent + 2);
    }
}

fn yaml_body(out: &mut String, node: &SchemaNode, indent: usize) {
    let pad = " ".repeat(indent);
    let _ = writeln!(out, "{pad}type: {}", yaml_key(node.kind.as_str()));
    if let Some(d) = &node.description {
        let _ = writeln!(out, "{pad}description: {}", yaml_quote(d));
    }
    if let Some(values) = &node.enum_values {
        let list: Vec<_> = values.iter().map(|v| yaml_quote(v)).collect();
        let _ = writeln!(out, "{pad}enum: [{}]", list.join(", "));
    }
    if !node.properties.is_empty() {
        let _ = writeln!(out, "{pad}properties:");
        for (name, child) in &node.properties {
            yaml_entry(out, name, child, indent + 2);
        }
    }
    if let Some(items) = &node.items {
        yaml_entry(out, "items", items, indent);
    }
}

/// Block-style YAML for a whole schema; leaves use flow mappings.
pub(crate) fn schema_yaml(root: &SchemaNode) -> String {
    let mut out = String::new();
    yaml_body(&mut out, root, 0);
    out
}

/// YAML document holding one top-level property under its own key.
pub(crate) fn property_yaml(name: &str, node: &SchemaNode) -> String {
    let mut out = String::new();
    yaml_entry(&mut out, name, node, 0);
    out
}
