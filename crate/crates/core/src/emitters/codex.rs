//! XML-tagged Markdown: XML section markers around Markdown bodies.

use std::fmt::Write as _;

use super::markup::{
    code_span, dotted_schema_list, fenced_snippet, numbered_procedures, permission_line,
    security_banner, xml_attr, xml_text,
};
use super::{Emitter, RenderError, RenderedDocument};
use crate::ir::SkillIR;

#[derive(Debug, Clone, Copy, Default)]
pub struct CodexEmitter;

fn section(out: &mut String, tag: &str, field: &str, body: &str) -> Result<(), RenderError> {
    let _ = write!(out, "<{tag}>\n{}", xml_text(field, body)?);
    if !body.ends_with('\n') {
        out.push('\n');
    }
    let _ = writeln!(out, "</{tag}>");
    Ok(())
}

impl Emitter for CodexEmitter {
    fn render(&self, ir: &SkillIR) -> Result<RenderedDocument, RenderError> {
        let mut out = security_banner(ir).unwrap_or_default();
        let _ = writeln!(
            out,
            "<skill name=\"{}\" version=\"{}\">",
            xml_attr("name", &ir.name)?,
            xml_attr("version", &ir.version)?
        );
        section(&mut out, "description", "description", &ir.description)?;

        if !ir.mcp_servers.is_empty() || !ir.permissions.is_empty() {
            let mut body = String::new();
            for s in &ir.mcp_servers {
                let _ = writeln!(body, "- MCP server: {}", code_span(s));
            }
            for p in &ir.permissions {
                let _ = writeln!(body, "- Permission: {}", permission_line(p));
            }
            section(&mut out, "requirements", "requirements", &body)?;
        }

        if !ir.procedures.is_empty() {
            let mut body = String::new();
            numbered_procedures(&mut body, ir);
            section(&mut out, "instructions", "procedures.instruction", &body)?;
        }

        if let Some(schema) = &ir.input_schema {
            let mut body = String::new();
            dotted_schema_list(&mut body, schema);
            section(&mut out, "parameters", "input_schema", &body)?;
        }

        if !ir.code_blocks.is_empty() {
            let mut body = String::new();
            for (i, code) in ir.code_blocks.iter().enumerate() {
                if i > 0 {
                    body.push('\n');
                }
                fenced_snippet(&mut body, code);
            }
            section(&mut out, "reference_code", "code_blocks.content", &body)?;
        }

        if !ir.anti_skill_constraints.is_empty() {
            out.push_str("<constraints>\n");
            for c in &ir.anti_skill_constraints {
                let _ = writeln!(
                    out,
                    "  <forbidden>{}</forbidden>",
                    xml_text("anti_skill_constraints.content", &c.content)?
                );
            }
            out.push_str("</constraints>\n");
        }

        if !ir.examples.is_empty() {
            out.push_str("<examples>\n");
            for ex in &ir.examples {
                let _ = writeln!(
                    out,
                    "  <example>\n**Input:**\n{}\n\n**Output:**\n{}\n  </example>",
                    xml_text("examples.input", &ex.input)?,
                    xml_text("examples.output", &ex.output)?
                );
            }
            out.push_str("</examples>\n");
        }

        out.push_str("</skill>\n");
        Ok(RenderedDocument::new(out))
    }
}
