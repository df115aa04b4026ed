//! Phase 2: the typed, target-independent skill representation.

mod schema;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::diagnostics::{Diagnostic, DiagnosticCode, InterceptionCategory};
use crate::frontend::SectionRoles;
use crate::frontend::{BlockKind, RawAst};

pub use schema::{
    detect_yaml_optimization, max_nesting_depth, schema_from_json, SchemaKind, SchemaNode,
    SchemaParseError, YAML_DEPTH_THRESHOLD,
};

/// `source` of constraints the author wrote in a Constraints section.
pub const AUTHOR_SOURCE: &str = "author";

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum SecurityLevel {
    #[default]
    Low,
    Medium,
    High,
    Critical,
}

impl SecurityLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            SecurityLevel::Low => "low",
            SecurityLevel::Medium => "medium",
            SecurityLevel::High => "high",
            SecurityLevel::Critical => "critical",
        }
    }

    pub fn requires_hitl(self) -> bool {
        self >= SecurityLevel::High
    }
}

impl FromStr for SecurityLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(SecurityLevel::Low),
            "medium" => Ok(SecurityLevel::Medium),
            "high" => Ok(SecurityLevel::High),
            "critical" => Ok(SecurityLevel::Critical),
            other => Err(format!("unknown security level `{other}`")),
        }
    }
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermissionKind {
    Network,
    Filesystem,
    Process,
    Database,
}

impl PermissionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PermissionKind::Network => "network",
            PermissionKind::Filesystem => "filesystem",
            PermissionKind::Process => "process",
            PermissionKind::Database => "database",
        }
    }
}

impl FromStr for PermissionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "network" => Ok(PermissionKind::Network),
            "filesystem" => Ok(PermissionKind::Filesystem),
            "process" => Ok(PermissionKind::Process),
            "database" => Ok(PermissionKind::Database),
            other => Err(format!("unknown permission kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Permission {
    pub kind: PermissionKind,
    pub scope: String,
    pub read_only: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Procedure {
    pub order: u32,
    pub instruction: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub is_critical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintLevel {
    Info,
    Warning,
    Error,
}

impl ConstraintLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintLevel::Info => "info",
            ConstraintLevel::Warning => "warning",
            ConstraintLevel::Error => "error",
        }
    }
}

/// Where a constraint applies: the whole skill or one procedure step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintScope {
    Global,
    Step(u32),
}

impl fmt::Display for ConstraintScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintScope::Global => f.write_str("global"),
            ConstraintScope::Step(n) => write!(f, "step:{n}"),
        }
    }
}

impl FromStr for ConstraintScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "global" {
            return Ok(ConstraintScope::Global);
        }
        s.strip_prefix("step:")
            .and_then(|n| n.parse().ok())
            .filter(|n: &u32| *n > 0)
            .map(ConstraintScope::Step)
            .ok_or_else(|| format!("invalid constraint scope `{s}`"))
    }
}

impl Serialize for ConstraintScope {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConstraintScope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntiSkillConstraint {
    pub source: String,
    pub content: String,
    pub level: ConstraintLevel,
    pub scope: ConstraintScope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionMode {
    #[default]
    Sequential,
    Parallel,
}

impl ExecutionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExecutionMode::Sequential => "sequential",
            ExecutionMode::Parallel => "parallel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example {
    pub input: String,
    pub output: String,
}

/// A fenced code block from the skill body, kept for scanning and rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSnippet {
    pub language: String,
    pub content: String,
}

/// The skill IR. Field order is the canonical serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkillIR {
    pub name: String,
    pub version: String,
    pub description: String,
    pub mcp_servers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_schema: Option<SchemaNode>,
    pub security_level: SecurityLevel,
    pub hitl_required: bool,
    pub permissions: Vec<Permission>,
    pub procedures: Vec<Procedure>,
    pub anti_skill_constraints: Vec<AntiSkillConstraint>,
    pub requires_yaml_optimization: bool,
    pub mode: ExecutionMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<Example>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub code_blocks: Vec<CodeSnippet>,
    /// Level the author asked for in frontmatter; it can only raise the
    /// computed level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_security_level: Option<SecurityLevel>,
    pub source_hash: String,
}

impl SkillIR {
    /// An IR with only the identity fields set.
    pub fn minimal(name: &str, version: &str, description: &str) -> Self {
        SkillIR {
            name: name.to_owned(),
            version: version.to_owned(),
            description: description.to_owned(),
            mcp_servers: Vec::new(),
            input_schema: None,
            security_level: SecurityLevel::Low,
            hitl_required: false,
            permissions: Vec::new(),
            procedures: Vec::new(),
            anti_skill_constraints: Vec::new(),
            requires_yaml_optimization: false,
            mode: ExecutionMode::Sequential,
            examples: Vec::new(),
            code_blocks: Vec::new(),
            declared_security_level: None,
            source_hash: String::new(),
        }
    }

    pub fn schema_depth(&self) -> usize {
        self.input_schema.as_ref().map_or(0, max_nesting_depth)
    }

    /// Appends a constraint unless an identical (source, content) pair exists.
    /// Returns whether it was added.
    pub fn add_constraint(&mut self, constraint: AntiSkillConstraint) -> bool {
        let exists = self
            .anti_skill_constraints
            .iter()
            .any(|c| c.source == constraint.source && c.content == constraint.content);
        if !exists {
            self.anti_skill_constraints.push(constraint);
        }
        !exists
    }
}

/// The IR builder found an illegal field type or value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .diagnostic.message)]
pub struct SchemaValidationError {
    pub diagnostic: Diagnostic,
}

impl SchemaValidationError {
    pub fn category(&self) -> InterceptionCategory {
        InterceptionCategory::SchemaViolation
    }
}

/// IR plus non-fatal findings from the builder.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltIr {
    pub ir: SkillIR,
    pub warnings: Vec<Diagnostic>,
}

pub fn build_ir(ast: &RawAst) -> Result<SkillIR, SchemaValidationError> {
    build_ir_with_warnings(ast).map(|b| b.ir)
}

fn strip_list_marker(line: &str) -> &str {
    let t = line.trim_start();
    if let Some(rest) = t.strip_prefix(['-', '*', '+']) {
        if rest.is_empty() || rest.starts_with([' ', '\t']) {
            return rest.trim_start();
        }
    }
    let digits = t.len() - t.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 {
        if let Some(rest) = t[digits..].strip_prefix(['.', ')']) {
            if rest.is_empty() || rest.starts_with([' ', '\t']) {
                return rest.trim_start();
            }
        }
    }
    t
}

pub fn build_ir_with_warnings(ast: &RawAst) -> Result<BuiltIr, SchemaValidationError> {
    let fm = &ast.frontmatter;
    let fm_error = |code: DiagnosticCode, message: String| SchemaValidationError {
        diagnostic: Diagnostic::fatal(code, message).with_span(ast.frontmatter_span),
    };
    let mut warnings = Vec::new();

    let permissions = fm
        .declared_permissions
        .iter()
        .map(|p| {
            let kind = p
                .kind
                .parse::<PermissionKind>()
                .map_err(|e| fm_error(DiagnosticCode::SchemaPermission, e))?;
            if p.scope.trim().is_empty() {
                return Err(fm_error(
                    DiagnosticCode::SchemaPermission,
                    format!("{} permission has an empty scope", kind.as_str()),
                ));
            }
            Ok(Permission {
                kind,
                scope: p.scope.clone(),
                read_only: p.read_only,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mode = match fm.raw_extra.get("mode") {
        None => ExecutionMode::Sequential,
        Some(serde_yaml::Value::String(s)) if s == "sequential" => ExecutionMode::Sequential,
        Some(serde_yaml::Value::String(s)) if s == "parallel" => ExecutionMode::Parallel,
        Some(other) => {
            return Err(fm_error(
                DiagnosticCode::SchemaMode,
                format!(
                    "`mode` must be `sequential` or `parallel`, found `{}`",
                    serde_yaml::to_string(other).unwrap_or_default().trim()
                ),
            ))
        }
    };

    let declared_security_level = match fm.raw_extra.get("security_level") {
        None => None,
        Some(serde_yaml::Value::String(s)) => Some(
            s.parse::<SecurityLevel>()
                .map_err(|e| fm_error(DiagnosticCode::SchemaSecurityLevel, e))?,
        ),
        Some(_) => {
            return Err(fm_error(
                DiagnosticCode::SchemaSecurityLevel,
                "`security_level` must be one of low, medium, high, critical".to_owned(),
            ))
        }
    };

    let mut ir = SkillIR {
        mcp_servers: fm.mcp_servers.clone(),
        permissions,
        mode,
        declared_security_level,
        source_hash: ast.source_hash.clone(),
        ..SkillIR::minimal(&fm.name, &fm.version, &fm.description)
    };

    let mut roles = SectionRoles::default();
    for block in &ast.blocks {
        match &block.kind {
            BlockKind::Section { title, .. } => roles = SectionRoles::from_title(title),
            BlockKind::ProcedureStep {
                text,
                critical_marker,
                ..
            } => ir.procedures.push(Procedure {
                order: ir.procedures.len() as u32 + 1,
                instruction: text.clone(),
                is_critical: *critical_marker,
            }),
            BlockKind::CodeBlock {
                language_tag,
                content,
            } => ir.code_blocks.push(CodeSnippet {
                language: language_tag.clone(),
                content: content.clone(),
            }),
            BlockKind::ExamplePair {
                input_text,
                output_text,
            } => ir.examples.push(Example {
                input: input_text.clone(),
                output: output_text.clone(),
            }),
            BlockKind::SchemaBlock { raw_json_text } => {
                if ir.input_schema.is_some() {
                    warnings.push(
                        Diagnostic::warning(
                            DiagnosticCode::SchemaMultiple,
                            "more than one schema block; only the first is used",
                        )
                        .with_span(block.span),
                    );
                    continue;
                }
                let value: serde_json::Value =
                    serde_json::from_str(raw_json_text).map_err(|e| SchemaValidationError {
                        diagnostic: Diagnostic::fatal(
                            DiagnosticCode::SchemaJson,
                            format!("schema block is not valid JSON: {e}"),
                        )
                        .with_span(block.span),
                    })?;
                let schema = schema_from_json(&value).map_err(|e| SchemaValidationError {
                    diagnostic: Diagnostic::fatal(DiagnosticCode::SchemaType, e.to_string())
                        .with_span(block.span)
                        .with_hint(
                            "use one of object, array, string, number, integer, boolean, null",
                        ),
                })?;
                ir.input_schema = Some(schema);
            }
            BlockKind::Paragraph { text } if roles.constraint => {
                let content = text
                    .lines()
                    .enumerate()
                    .map(|(i, l)| {
                        if i == 0 {
                            strip_list_marker(l)
                        } else {
                            l.trim()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                if !content.is_empty() {
                    ir.add_constraint(AntiSkillConstraint {
                        source: AUTHOR_SOURCE.to_owned(),
                        content,
                        level: ConstraintLevel::Warning,
                        scope: ConstraintScope::Global,
                    });
                }
            }
            BlockKind::Paragraph { .. } => {}
        }
    }
    ir.requires_yaml_optimization = detect_yaml_optimization(ir.input_schema.as_ref());
    Ok(BuiltIr { ir, warnings })
}

#[derive(Debug, Error)]
#[error("malformed IR document: {0}")]
pub struct IrDecodeError(#[from] serde_json::Error);

/// Canonical JSON: declaration-ordered fields, two-space indent, trailing newline.
pub fn serialize_ir(ir: &SkillIR) -> String {
    let mut text = serde_json::to_string_pretty(ir).expect("IR serialization is infallible");
    text.push('\n');
    text
}

pub fn deserialize_ir(text: &str) -> Result<SkillIR, IrDecodeError> {
    Ok(serde_json::from_str(text)?)
}
