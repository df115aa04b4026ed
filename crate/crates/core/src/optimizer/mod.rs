//! Phase 3: the security chain. Structural validation, permission
//! auditing, anti-skill injection and security classification run in that
//! order over one IR.

mod baseline;
mod rules;

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::{Diagnostic, DiagnosticCode, InterceptionCategory, Severity};
use crate::ir::{detect_yaml_optimization, PermissionKind, SecurityLevel, SkillIR};

pub use baseline::{BaselineError, SecurityBaseline};
pub use rules::{
    inject_anti_skill, scan_surface, tokenize, InjectionRule, RuleLevel, RuleSet, RuleSetError,
    DB_SAFETY, HTTP_SAFETY, INJECTOR_SOURCE, LOOP_SAFETY, PARSE_SAFETY,
};

/// An IR that passed every security pass, with what the passes found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidatedSkillIR {
    pub ir: SkillIR,
    pub diagnostics: Vec<Diagnostic>,
    pub triggered_rule_ids: BTreeSet<String>,
}

impl ValidatedSkillIR {
    pub fn warning_count(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .count()
    }
}

/// Compile-time rejection of a skill.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{category}: {}", summary(.diagnostics))]
pub struct CompilationInterception {
    pub category: InterceptionCategory,
    pub diagnostics: Vec<Diagnostic>,
}

fn summary(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .find(|d| d.is_fatal())
        .or_else(|| diags.first())
        .map_or_else(String::new, |d| format!("{} {}", d.code, d.message))
}

impl CompilationInterception {
    /// Builds an interception whose category is that of the first fatal
    /// diagnostic in `diagnostics`.
    pub fn from_diagnostics(diagnostics: Vec<Diagnostic>) -> Self {
        let category = diagnostics
            .iter()
            .find(|d| d.is_fatal())
            .map_or(InterceptionCategory::SecurityInterception, |d| {
                d.code.category()
            });
        CompilationInterception {
            category,
            diagnostics,
        }
    }
}

/// `[a-z0-9][a-z0-9-]*`
pub fn is_kebab_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
}

/// `MAJOR.MINOR.PATCH` with non-negative integer components.
pub fn is_semver_triple(version: &str) -> bool {
    let parts: Vec<_> = version.split('.').collect();
    parts.len() == 3
        && parts
            .iter()
            .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
}

pub fn validate_structure(ir: &SkillIR, baseline: &SecurityBaseline) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if !is_kebab_identifier(&ir.name) {
        diags.push(
            Diagnostic::fatal(
                DiagnosticCode::FmName,
                format!("skill name `{}` must match [a-z0-9][a-z0-9-]*", ir.name),
            )
            .with_hint("use a lowercase kebab-case identifier such as `github-api-client`"),
        );
    }
    if !is_semver_triple(&ir.version) {
        let message = if ir.version.is_empty() {
            "frontmatter is missing `version`".to_owned()
        } else {
            format!("version `{}` must be MAJOR.MINOR.PATCH", ir.version)
        };
        diags.push(
            Diagnostic::fatal(DiagnosticCode::FmVersion, message)
                .with_hint("e.g. `version: 1.0.0`"),
        );
    }
    if ir.description.trim().is_empty() {
        diags.push(Diagnostic::fatal(
            DiagnosticCode::FmDescription,
            "description must not be empty",
        ));
    }
    let mut seen = HashSet::new();
    for server in &ir.mcp_servers {
        if !seen.insert(server.as_str()) {
            diags.push(Diagnostic::fatal(
                DiagnosticCode::FmMcpDuplicate,
                format!("MCP server `{server}` is declared more than once"),
            ));
        }
    }
    if let Some(schema) = &ir.input_schema {
        for violation in schema.shape_violations() {
            diags.push(Diagnostic::fatal(
                DiagnosticCode::SchemaShape,
                format!("input schema is inconsistent: {violation}"),
            ));
        }
    }
    for server in &ir.mcp_servers {
        if !baseline.trusted_mcp_servers.contains(server) {
            diags.push(
                Diagnostic::fatal(
                    DiagnosticCode::McpUntrusted,
                    format!("MCP server `{server}` is not in the trusted server list"),
                )
                .with_hint("add it to the baseline's trusted_mcp_servers if it is vetted"),
            );
        }
    }
    diags
}

pub fn audit_permissions(ir: &SkillIR, baseline: &SecurityBaseline) -> Vec<Diagnostic> {
    let compiled = baseline.compile();
    let mut diags = Vec::new();
    for perm in &ir.permissions {
        match perm.kind {
            PermissionKind::Filesystem if !perm.read_only => {
                if baseline::is_root_write_scope(&perm.scope) {
                    diags.push(
                        Diagnostic::fatal(
                            DiagnosticCode::PermForbidden,
                            format!(
                                "filesystem write access to `{}` grants the whole filesystem",
                                perm.scope
                            ),
                        )
                        .with_hint("restrict writes to a directory under the workspace"),
                    );
                } else if !compiled.write_scope_allowed(&perm.scope) {
                    diags.push(Diagnostic::warning(
                        DiagnosticCode::PermBroad,
                        format!(
                            "filesystem write scope `{}` is outside the allowed write roots",
                            perm.scope
                        ),
                    ));
                }
            }
            PermissionKind::Network => {
                if let Some(pattern) = compiled.broad_network_match(&perm.scope) {
                    diags.push(
                        Diagnostic::warning(
                            DiagnosticCode::PermBroad,
                            format!(
                                "network scope `{}` is at least as broad as forbidden pattern `{pattern}`",
                                perm.scope
                            ),
                        )
                        .with_hint("narrow the scope to the hosts the skill talks to"),
                    );
                }
            }
            _ => {}
        }
    }
    if ir.permissions.len() > baseline.max_permissions {
        diags.push(Diagnostic::warning(
            DiagnosticCode::PermCount,
            format!(
                "skill declares {} permissions; the baseline allows at most {}",
                ir.permissions.len(),
                baseline.max_permissions
            ),
        ));
    }
    diags
}

/// Tiered classification:
///
/// | level    | condition                                               |
/// |----------|---------------------------------------------------------|
/// | critical | db-safety fired, a write permission, and a broad scope  |
/// | high     | a write permission and any rule fired                   |
/// | medium   | any rule fired, or a broad scope                        |
/// | low      | otherwise                                               |
///
/// An author-declared level can raise the result but never lower it.
pub fn classify_security(
    ir: &SkillIR,
    audit_diags: &[Diagnostic],
    triggered: &BTreeSet<String>,
) -> (SecurityLevel, bool) {
    let has_write = ir.permissions.iter().any(|p| !p.read_only);
    let has_broad = audit_diags
        .iter()
        .any(|d| d.code == DiagnosticCode::PermBroad);
    let computed = if triggered.contains(DB_SAFETY) && has_write && has_broad {
        SecurityLevel::Critical
    } else if has_write && !triggered.is_empty() {
        SecurityLevel::High
    } else if !triggered.is_empty() || has_broad {
        SecurityLevel::Medium
    } else {
        SecurityLevel::Low
    };
    let level = computed.max(ir.declared_security_level.unwrap_or(SecurityLevel::Low));
    (level, level.requires_hitl())
}

/// Runs the four passes. Any fatal diagnostic stops the chain at that pass.
pub fn optimize(
    ir: &SkillIR,
    baseline: &SecurityBaseline,
    rules: &RuleSet,
) -> Result<ValidatedSkillIR, CompilationInterception> {
    let mut diagnostics = validate_structure(ir, baseline);
    if diagnostics.iter().any(Diagnostic::is_fatal) {
        return Err(CompilationInterception::from_diagnostics(diagnostics));
    }

    let audit = audit_permissions(ir, baseline);
    diagnostics.extend(audit.iter().cloned());
    if diagnostics.iter().any(Diagnostic::is_fatal) {
        return Err(CompilationInterception::from_diagnostics(diagnostics));
    }

    let (mut out, triggered) = inject_anti_skill(ir, rules);
    for rule in rules.rules().iter().filter(|r| triggered.contains(&r.id)) {
        diagnostics.push(Diagnostic::info(
            DiagnosticCode::RuleTriggered,
            format!(
                "rule `{}` fired; injected: {}",
                rule.id, rule.constraint_text
            ),
        ));
    }

    let (level, hitl) = classify_security(&out, &audit, &triggered);
    out.security_level = level;
    out.hitl_required = hitl;
    out.requires_yaml_optimization = detect_yaml_optimization(out.input_schema.as_ref());

    Ok(ValidatedSkillIR {
        ir: out,
        diagnostics,
        triggered_rule_ids: triggered,
    })
}
