//! Diagnostics shared by every compiler phase.
//!
//! A [`Diagnostic`] carries a stable [`DiagnosticCode`], a [`Severity`], a
//! message and an optional [`Span`] into the skill source. Fatal diagnostics
//! stop compilation of the skill; warnings and info entries travel with the
//! validated IR.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::frontend::SourceFile;

/// Byte range into a source file plus the 1-based line/column of its start.
///
/// Columns count Unicode scalar values, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start_byte: usize,
    pub end_byte: usize,
    pub start_line: usize,
    pub start_col: usize,
}

impl Span {
    /// Builds a span for `start..end` in `text`, computing line and column.
    ///
    /// Offsets are clamped to the text length and snapped back to the nearest
    /// char boundary.
    pub fn from_range(text: &str, start: usize, end: usize) -> Self {
        let start = floor_char_boundary(text, start.min(text.len()));
        let end = floor_char_boundary(text, end.min(text.len())).max(start);
        let (line, col) = line_col(text, start);
        Span {
            start_byte: start,
            end_byte: end,
            start_line: line,
            start_col: col,
        }
    }

    pub fn len(&self) -> usize {
        self.end_byte - self.start_byte
    }

    pub fn is_empty(&self) -> bool {
        self.start_byte == self.end_byte
    }
}

fn floor_char_boundary(text: &str, mut idx: usize) -> usize {
    while idx > 0 && !text.is_char_boundary(idx) {
        idx -= 1;
    }
    idx
}

/// 1-based (line, column) of byte offset `offset` in `text`.
pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.bytes().filter(|b| *b == b'\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let col = text[line_start..offset].chars().count() + 1;
    (line, col)
}

/// Precomputed line starts for repeated span construction over one text.
#[derive(Debug, Clone)]
pub(crate) struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub(crate) fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    pub(crate) fn span(&self, text: &str, start: usize, end: usize) -> Span {
        let line_idx = match self.starts.binary_search(&start) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let line_start = self.starts[line_idx];
        Span {
            start_byte: start,
            end_byte: end.max(start),
            start_line: line_idx + 1,
            start_col: text[line_start..start].chars().count() + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Fatal,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Fatal => "fatal",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which class of compile-time interception a fatal diagnostic belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterceptionCategory {
    /// Frontmatter could not be read or violates its invariants.
    YamlViolation,
    /// A dangerous permission or untrusted dependency.
    SecurityInterception,
    /// Illegal schema, permission or mode types found while building the IR.
    SchemaViolation,
}

impl InterceptionCategory {
    pub const ALL: [InterceptionCategory; 3] = [
        InterceptionCategory::YamlViolation,
        InterceptionCategory::SecurityInterception,
        InterceptionCategory::SchemaViolation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InterceptionCategory::YamlViolation => "yaml_violation",
            InterceptionCategory::SecurityInterception => "security_interception",
            InterceptionCategory::SchemaViolation => "schema_violation",
        }
    }
}

impl fmt::Display for InterceptionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! diagnostic_codes {
    ($( $(#[$doc:meta])* $variant:ident => $text:literal, $category:ident; )*) => {
        /// The closed registry of diagnostic codes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum DiagnosticCode {
            $( $(#[$doc])* #[serde(rename = $text)] $variant, )*
        }

        impl DiagnosticCode {
            pub const ALL: &'static [DiagnosticCode] = &[$(DiagnosticCode::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(DiagnosticCode::$variant => $text,)*
                }
            }

            /// Interception class used when a diagnostic with this code is fatal.
            pub fn category(self) -> InterceptionCategory {
                match self {
                    $(DiagnosticCode::$variant => InterceptionCategory::$category,)*
                }
            }
        }
    };
}

diagnostic_codes! {
    /// Source is not valid UTF-8.
    FmEncoding => "FM_ENCODING", YamlViolation;
    /// Missing delimiters, unparseable YAML, or a required key absent or mistyped.
    FmYaml => "FM_YAML", YamlViolation;
    /// A top-level frontmatter key occurs more than once.
    FmDuplicateKey => "FM_DUP_KEY", YamlViolation;
    /// `name` is not a lowercase kebab identifier.
    FmName => "FM_NAME", YamlViolation;
    /// `version` is missing or not MAJOR.MINOR.PATCH.
    FmVersion => "FM_VERSION", YamlViolation;
    /// `description` is empty.
    FmDescription => "FM_DESCRIPTION", YamlViolation;
    /// `mcp_servers` lists a server twice.
    FmMcpDuplicate => "FM_MCP_DUP", YamlViolation;
    /// A schema block is not valid JSON.
    SchemaJson => "SCHEMA_JSON", SchemaViolation;
    /// A schema node has a missing or unknown `type`.
    SchemaType => "SCHEMA_TYPE", SchemaViolation;
    /// A schema node carries properties/items inconsistent with its type.
    SchemaShape => "SCHEMA_SHAPE", SchemaViolation;
    /// More than one schema block; only the first is used.
    SchemaMultiple => "SCHEMA_MULTIPLE", SchemaViolation;
    /// `mode` is not `sequential` or `parallel`.
    SchemaMode => "SCHEMA_MODE", SchemaViolation;
    /// A declared permission has an unknown kind or empty scope.
    SchemaPermission => "SCHEMA_PERMISSION", SchemaViolation;
    /// A declared security level hint is not a known level.
    SchemaSecurityLevel => "SCHEMA_SECURITY_LEVEL", SchemaViolation;
    /// A declared MCP server is not in the trusted set.
    McpUntrusted => "MCP_UNTRUSTED", SecurityInterception;
    /// A permission scope is broader than the baseline allows.
    PermBroad => "PERM_BROAD", SecurityInterception;
    /// A filesystem write grant on the root of the filesystem.
    PermForbidden => "PERM_FORBIDDEN", SecurityInterception;
    /// More permissions than the baseline maximum.
    PermCount => "PERM_COUNT", SecurityInterception;
    /// An anti-skill rule fired and its constraint was injected.
    RuleTriggered => "RULE_TRIGGERED", SecurityInterception;
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub severity: Severity,
    pub message: String,
    pub span: Option<Span>,
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, severity: Severity, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity,
            message: message.into(),
            span: None,
            hint: None,
        }
    }

    pub fn fatal(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Fatal, message)
    }

    pub fn warning(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Warning, message)
    }

    pub fn info(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Info, message)
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub fn is_fatal(&self) -> bool {
        self.severity == Severity::Fatal
    }
}

/// Renders a diagnostic as a human-readable block.
///
/// ```text
/// warning PERM_BROAD: network scope `*` is broader than the baseline allows
///  3 | permissions: [{kind: network, scope: "*"}]
///    |              ^^^^
/// hint: narrow the scope to the hosts the skill talks to
/// ```
///
/// The snippet is printed only when the diagnostic has a span and `source`
/// is supplied.
pub fn render_diagnostic(d: &Diagnostic, source: Option<&SourceFile>) -> String {
    let mut out = format!("{} {}: {}", d.severity, d.code, d.message);
    if let (Some(span), Some(src)) = (d.span, source) {
        let text = src.content();
        let start = floor_char_boundary(text, span.start_byte.min(text.len()));
        let line_start = text[..start].rfind('\n').map_or(0, |i| i + 1);
        let line_end = text[start..].find('\n').map_or(text.len(), |i| start + i);
        let line = text[line_start..line_end].trim_end_matches('\r');
        let (line_no, col) = line_col(text, start);
        let gutter = line_no.to_string();
        let pad = " ".repeat(gutter.len());
        let span_end = span.end_byte.min(line_end).max(start);
        let width = text
            .get(start..span_end)
            .map_or(1, |s| s.chars().count())
            .max(1);
        out.push_str(&format!("\n{gutter} | {line}"));
        out.push_str(&format!(
            "\n{pad} | {}{}",
            " ".repeat(col - 1),
            "^".repeat(width)
        ));
    }
    if let Some(hint) = &d.hint {
        out.push_str("\nhint: ");
        out.push_str(hint);
    }
    out
}
