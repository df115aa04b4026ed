use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_yaml::Value;

use super::{FrontmatterError, SourceFile};
use crate::diagnostics::{Diagnostic, DiagnosticCode, LineIndex, Span};

const DELIMITER: &str = "---";

/// A permission as written by the author, before kind validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionDecl {
    pub kind: String,
    pub scope: String,
    pub read_only: bool,
}

/// Typed frontmatter. Keys the compiler does not know about are kept in
/// `raw_extra` in source order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frontmatter {
    pub name: String,
    pub description: String,
    /// Empty when the key is absent; structural validation rejects that.
    pub version: String,
    pub mcp_servers: Vec<String>,
    pub declared_permissions: Vec<PermissionDecl>,
    pub raw_extra: IndexMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFrontmatter {
    pub frontmatter: Frontmatter,
    /// Byte offset in the source where the Markdown body begins.
    pub body_offset: usize,
    pub yaml_span: Span,
    pub warnings: Vec<Diagnostic>,
}

struct Split<'a> {
    yaml: &'a str,
    yaml_start: usize,
    body_offset: usize,
}

fn line_ends(text: &str, start: usize) -> (usize, usize) {
    match text[start..].find('\n') {
        Some(i) => (start + i, start + i + 1),
        None => (text.len(), text.len()),
    }
}

fn split(text: &str) -> Result<Split<'_>, Diagnostic> {
    let (first_end, mut cursor) = line_ends(text, 0);
    if text[..first_end].trim_end_matches('\r') != DELIMITER {
        return Err(Diagnostic::fatal(
            DiagnosticCode::FmYaml,
            "missing opening `---` frontmatter delimiter on the first line",
        )
        .with_span(Span::from_range(text, 0, first_end))
        .with_hint("start the file with a line containing exactly `---`"));
    }
    let yaml_start = cursor;
    while cursor < text.len() {
        let (end, next) = line_ends(text, cursor);
        if text[cursor..end].trim_end_matches('\r') == DELIMITER {
            return Ok(Split {
                yaml: &text[yaml_start..cursor],
                yaml_start,
                body_offset: next,
            });
        }
        cursor = next;
    }
    Err(Diagnostic::fatal(
        DiagnosticCode::FmYaml,
        "missing closing `---` frontmatter delimiter",
    )
    .with_span(Span::from_range(text, 0, first_end))
    .with_hint("close the metadata block with a line containing exactly `---`"))
}

/// Finds the key of a top-level block-mapping entry, if `line` starts one.
fn top_level_key(line: &str) -> Option<String> {
    let line = line.trim_end_matches('\r');
    let first = line.chars().next()?;
    if first.is_whitespace() || matches!(first, '#' | '-' | '{' | '[' | '?' | '|' | '>') {
        return None;
    }
    if first == '"' || first == '\'' {
        let close = line[1..].find(first)? + 1;
        let rest = line[close + 1..].trim_start();
        return rest.starts_with(':').then(|| line[1..close].to_owned());
    }
    let colon = line
        .match_indices(':')
        .map(|(i, _)| i)
        .find(|&i| line[i + 1..].is_empty() || line[i + 1..].starts_with([' ', '\t']))?;
    Some(line[..colon].trim_end().to_owned())
}

/// Drops all but the last occurrence of every duplicated top-level key.
/// Returns the rewritten YAML (or `None` when nothing was duplicated) and a
/// warning per dropped occurrence.
fn dedupe_top_level(
    yaml: &str,
    yaml_start: usize,
    source: &str,
    index: &LineIndex,
) -> (Option<String>, Vec<Diagnostic>) {
    let mut entries: Vec<(String, usize)> = Vec::new();
    let mut offset = 0;
    for line in yaml.split_inclusive('\n') {
        if let Some(key) = top_level_key(line) {
            entries.push((key, offset));
        }
        offset += line.len();
    }
    let mut last: IndexMap<&str, usize> = IndexMap::new();
    for (i, (key, _)) in entries.iter().enumerate() {
        last.insert(key.as_str(), i);
    }
    if last.len() == entries.len() {
        return (None, Vec::new());
    }
    let mut kept = String::with_capacity(yaml.len());
    let mut warnings = Vec::new();
    // Anything before the first key (comments) is kept.
    kept.push_str(&yaml[..entries.first().map_or(yaml.len(), |e| e.1)]);
    for (i, (key, start)) in entries.iter().enumerate() {
        let end = entries.get(i + 1).map_or(yaml.len(), |e| e.1);
        if last[key.as_str()] == i {
            kept.push_str(&yaml[*start..end]);
        } else {
            let line_len = yaml[*start..end].find('\n').unwrap_or(end - start);
            let abs = yaml_start + start;
            warnings.push(
                Diagnostic::warning(
                    DiagnosticCode::FmDuplicateKey,
                    format!("frontmatter key `{key}` is repeated; the last occurrence wins"),
                )
                .with_span(index.span(source, abs, abs + line_len)),
            );
        }
    }
    (Some(kept), warnings)
}

fn yaml_error(
    source: &str,
    split: &Split<'_>,
    rewritten: bool,
    err: &serde_yaml::Error,
) -> Diagnostic {
    let span = match err.location() {
        Some(loc) if !rewritten => {
            let at = (split.yaml_start + loc.index()).min(source.len());
            Span::from_range(source, at, at)
        }
        _ => Span::from_range(
            source,
            split.yaml_start,
            split.yaml_start + split.yaml.len(),
        ),
    };
    Diagnostic::fatal(
        DiagnosticCode::FmYaml,
        format!("frontmatter is not valid YAML: {err}"),
    )
    .with_span(span)
}

fn key_text(key: &Value) -> Option<String> {
    match key {
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::Null => Some("null".to_owned()),
        _ => None,
    }
}

/// Characters no XML 1.0 document can carry.
fn is_disallowed_char(c: char) -> bool {
    (c < ' ' && !matches!(c, '\t' | '\n' | '\r')) || matches!(c, '\u{fffe}' | '\u{ffff}')
}

/// Parses the `---`-delimited YAML block at the start of `source`.
pub fn parse_frontmatter(source: &SourceFile) -> Result<ParsedFrontmatter, FrontmatterError> {
    let text = source.content();
    if let Some((at, c)) = text.char_indices().find(|&(_, c)| is_disallowed_char(c)) {
        return Err(FrontmatterError::new(
            Diagnostic::fatal(
                DiagnosticCode::FmEncoding,
                format!("source contains control character U+{:04X}", c as u32),
            )
            .with_span(Span::from_range(text, at, at + c.len_utf8()))
            .with_hint("remove the character; only tab, LF and CR are allowed"),
        ));
    }
    let split = split(text).map_err(FrontmatterError::new)?;
    let index = LineIndex::new(text);
    let yaml_span = index.span(text, split.yaml_start, split.yaml_start + split.yaml.len());
    let (rewritten, warnings) = dedupe_top_level(split.yaml, split.yaml_start, text, &index);
    let fail = |d: Diagnostic| FrontmatterError {
        diagnostic: d,
        warnings: warnings.clone(),
    };

    let yaml = rewritten.as_deref().unwrap_or(split.yaml);
    let value: Value = if yaml.trim().is_empty() {
        Value::Null
    } else {
        serde_yaml::from_str(yaml)
            .map_err(|e| fail(yaml_error(text, &split, rewritten.is_some(), &e)))?
    };
    let mapping = match value {
        Value::Mapping(m) => m,
        Value::Null => {
            return Err(fail(
                Diagnostic::fatal(DiagnosticCode::FmYaml, "frontmatter is empty")
                    .with_span(yaml_span)
                    .with_hint("declare at least `name` and `description`"),
            ))
        }
        _ => {
            return Err(fail(
                Diagnostic::fatal(DiagnosticCode::FmYaml, "frontmatter must be a YAML mapping")
                    .with_span(yaml_span),
            ))
        }
    };

    let mut fields: IndexMap<String, Value> = IndexMap::with_capacity(mapping.len());
    for (k, v) in mapping {
        let key = key_text(&k).ok_or_else(|| {
            fail(
                Diagnostic::fatal(DiagnosticCode::FmYaml, "frontmatter keys must be scalars")
                    .with_span(yaml_span),
            )
        })?;
        fields.insert(key, v);
    }

    let type_error = |key: &str, expected: &str| {
        fail(
            Diagnostic::fatal(
                DiagnosticCode::FmYaml,
                format!("frontmatter key `{key}` must be {expected}"),
            )
            .with_span(yaml_span),
        )
    };
    let mut required_string = |key: &str| -> Result<String, FrontmatterError> {
        match fields.shift_remove(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(type_error(key, "a string")),
            None => Err(fail(
                Diagnostic::fatal(
                    DiagnosticCode::FmYaml,
                    format!("frontmatter is missing required key `{key}`"),
                )
                .with_span(yaml_span),
            )),
        }
    };
    let name = required_string("name")?;
    let description = required_string("description")?;

    let version = match fields.shift_remove("version") {
        None => String::new(),
        Some(Value::String(s)) => s,
        Some(_) => return Err(type_error("version", "a string such as \"1.0.0\"")),
    };

    let mcp_servers = match fields.shift_remove("mcp_servers") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Sequence(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                _ => Err(type_error("mcp_servers", "a list of server names")),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(type_error("mcp_servers", "a list of server names")),
    };

    let declared_permissions = match fields.shift_remove("permissions") {
        None | Some(Value::Null) => Vec::new(),
        Some(v @ Value::Sequence(_)) => serde_yaml::from_value::<Vec<PermissionEntry>>(v)
            .map_err(|_| type_error("permissions", "a list of {kind, scope, read_only} entries"))?
            .into_iter()
            .map(PermissionEntry::into_decl)
            .collect(),
        Some(_) => {
            return Err(type_error(
                "permissions",
                "a list of {kind, scope, read_only} entries",
            ))
        }
    };

    Ok(ParsedFrontmatter {
        frontmatter: Frontmatter {
            name,
            description,
            version,
            mcp_servers,
            declared_permissions,
            raw_extra: fields,
        },
        body_offset: split.body_offset,
        yaml_span,
        warnings,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PermissionEntry {
    kind: String,
    scope: String,
    #[serde(default)]
    read_only: bool,
}

impl PermissionEntry {
    fn into_decl(self) -> PermissionDecl {
        PermissionDecl {
            kind: self.kind,
            scope: self.scope,
            read_only: self.read_only,
        }
    }
}
