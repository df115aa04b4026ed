//! Full Markdown. Nothing is summarized and schemas never switch to YAML.

use std::fmt::Write as _;

use super::markup::{
    code_span, dotted_schema_list, fenced_snippet, numbered_procedures, permission_line,
    security_banner,
};
use super::{Emitter, RenderError, RenderedDocument};
use crate::ir::SkillIR;

#[derive(Debug, Clone, Copy, Default)]
pub struct KimiEmitter;

impl Emitter for KimiEmitter {
    fn render(&self, ir: &SkillIR) -> Result<RenderedDocument, RenderError> {
        let mut out = security_banner(ir).unwrap_or_default();
        let _ = writeln!(out, "# {}\n\n## Description\n{}", ir.name, ir.description);

        let _ = writeln!(
            out,
            "\n## Metadata\n- Version: {}\n- Security level: {}\n- Human-in-the-loop: {}\n- Execution mode: {}",
            ir.version,
            ir.security_level,
            if ir.hitl_required { "required" } else { "not required" },
            ir.mode.as_str()
        );

        if !ir.mcp_servers.is_empty() {
            out.push_str("\n## MCP Servers\n");
            for s in &ir.mcp_servers {
                let _ = writeln!(out, "- {}", code_span(s));
            }
        }

        if !ir.permissions.is_empty() {
            out.push_str("\n## Permissions\n");
            for p in &ir.permissions {
                let _ = writeln!(out, "- {}", permission_line(p));
            }
        }

        if !ir.procedures.is_empty() {
            out.push_str("\n## Procedures\n");
            numbered_procedures(&mut out, ir);
        }

        if let Some(schema) = &ir.input_schema {
            out.push_str("\n## Parameter Schema\n");
            dotted_schema_list(&mut out, schema);
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
                let _ = writeln!(
                    out,
                    "- {} (level: {}; scope: {}; source: {})",
                    c.content,
                    c.level.as_str(),
                    c.scope,
                    c.source
                );
            }
        }

        if !ir.examples.is_empty() {
            out.push_str("\n## Examples\n");
            for (i, ex) in ir.examples.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "\n### Example {}\n**Input:**\n{}\n\n**Output:**\n{}",
                    i + 1,
                    ex.input,
                    ex.output
                );
            }
        }

        Ok(RenderedDocument::new(out))
    }
}
