//! Markdown with conditional YAML for deeply nested parameter schemas.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::markup::{
    code_span, describe_node, fence, fenced_snippet, numbered_procedures, permission_line,
    property_yaml, schema_yaml, security_banner,
};
use super::{Emitter, RenderError, RenderedDocument};
use crate::ir::{max_nesting_depth, SchemaNode, SkillIR, YAML_DEPTH_THRESHOLD};

#[derive(Debug, Clone, Copy, Default)]
pub struct GeminiEmitter;

fn file_component(text: &str) -> String {
    let s: String = text
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "_".to_owned()
    } else {
        s
    }
}

/// `<skill>.<property>.schema.yaml` for each top-level property whose subtree
/// reaches the YAML threshold when counted from the root.
fn schema_assets(ir: &SkillIR, schema: &SchemaNode) -> Vec<(String, String)> {
    let mut used = HashSet::new();
    let mut assets = Vec::new();
    for (name, prop) in &schema.properties {
        if 1 + max_nesting_depth(prop) < YAML_DEPTH_THRESHOLD {
            continue;
        }
        let stem = format!("{}.{}", file_component(&ir.name), file_component(name));
        let mut path = format!("{stem}.schema.yaml");
        let mut n = 2;
        while !used.insert(path.clone()) {
            path = format!("{stem}-{n}.schema.yaml");
            n += 1;
        }
        assets.push((path, property_yaml(name, prop)));
    }
    assets
}

fn nested_bullets(out: &mut String, label: &str, node: &SchemaNode, indent: usize) {
    let _ = writeln!(
        out,
        "{}- {} {}",
        " ".repeat(indent),
        code_span(label),
        describe_node(node)
    );
    for (name, child) in &node.properties {
        nested_bullets(out, name, child, indent + 2);
    }
    if let Some(items) = &node.items {
        nested_bullets(out, "[]", items, indent + 2);
    }
}

impl Emitter for GeminiEmitter {
    fn render(&self, ir: &SkillIR) -> Result<RenderedDocument, RenderError> {
        let mut out = security_banner(ir).unwrap_or_default();
        let _ = writeln!(out, "# {}\n\n{}", ir.name, ir.description);
        let mut assets = Vec::new();

        if !ir.mcp_servers.is_empty() || !ir.permissions.is_empty() {
            out.push_str("\n## Requirements\n");
            for s in &ir.mcp_servers {
                let _ = writeln!(out, "- MCP server: {}", code_span(s));
            }
            for p in &ir.permissions {
                let _ = writeln!(out, "- Permission: {}", permission_line(p));
            }
        }

        if !ir.procedures.is_empty() {
            out.push_str("\n## Procedures\n");
            numbered_procedures(&mut out, ir);
        }

        if let Some(schema) = &ir.input_schema {
            if ir.requires_yaml_optimization {
                out.push_str("\n## Parameter Schema (YAML Optimized)\n");
                fence(&mut out, "yaml", &schema_yaml(schema));
                assets = schema_assets(ir, schema);
                if !assets.is_empty() {
                    out.push_str("\nSchema assets:\n");
                    for (path, _) in &assets {
                        let _ = writeln!(out, "- {}", code_span(path));
                    }
                }
            } else {
                out.push_str("\n## Parameter Schema\n");
                if schema.properties.is_empty() {
                    nested_bullets(&mut out, "(root)", schema, 0);
                } else {
                    for (name, child) in &schema.properties {
                        nested_bullets(&mut out, name, child, 0);
                    }
                }
            }
        }

        if !ir.code_blocks.is_empty() {
            out.push_str("\n## Reference Code\n");
            for code in &ir.code_blocks {
                out.push('\n');
                fenced_snippet(&mut out, code);
            }
        }

        if !ir.anti_skill_constraints.is_empty() {
            out.push_str("\n## Constraints\n");
            for c in &ir.anti_skill_constraints {
                let _ = writeln!(out, "- {}", c.content);
            }
        }

        if !ir.examples.is_empty() {
            out.push_str("\n## Examples\n");
            for ex in &ir.examples {
                let _ = writeln!(
                    out,
                    "\n**Input:**\n{}\n\n**Output:**\n{}",
                    ex.input, ex.output
                );
            }
        }

        Ok(RenderedDocument {
            main_document: out,
            asset_files: assets,
        })
    }
}
