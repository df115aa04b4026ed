//! XML semantic layering.

use std::fmt::Write as _;

use super::markup::{schema_entries, security_banner, xml_attr, xml_text};
use super::{Emitter, RenderError, RenderedDocument};
use crate::ir::SkillIR;

#[derive(Debug, Clone, Copy, Default)]
pub struct ClaudeEmitter;

impl Emitter for ClaudeEmitter {
    fn render(&self, ir: &SkillIR) -> Result<RenderedDocument, RenderError> {
        let mut out = security_banner(ir).unwrap_or_default();
        let _ = writeln!(
            out,
            "<agent_skill name=\"{}\" version=\"{}\">",
            xml_attr("name", &ir.name)?,
            xml_attr("version", &ir.version)?
        );
        let _ = writeln!(
            out,
            "  <description>{}</description>",
            xml_text("description", &ir.description)?
        );

        if !ir.mcp_servers.is_empty() {
            out.push_str("  <mcp_servers>\n");
            for s in &ir.mcp_servers {
                let _ = writeln!(out, "    <server>{}</server>", xml_text("mcp_servers", s)?);
            }
            out.push_str("  </mcp_servers>\n");
        }

        if !ir.permissions.is_empty() {
            out.push_str("  <permissions>\n");
            for p in &ir.permissions {
                let _ = writeln!(
                    out,
                    "    <permission kind=\"{}\" scope=\"{}\" read_only=\"{}\"/>",
                    p.kind.as_str(),
                    xml_attr("permissions.scope", &p.scope)?,
                    p.read_only
                );
            }
            out.push_str("  </permissions>\n");
        }

        if let Some(schema) = &ir.input_schema {
            out.push_str("  <input_schema>\n");
            for entry in schema_entries(schema) {
                let _ = write!(
                    out,
                    "    <parameter path=\"{}\" type=\"{}\"",
                    xml_attr("input_schema", entry.display_path())?,
                    entry.node.kind
                );
                if let Some(values) = &entry.node.enum_values {
                    let _ = write!(
                        out,
                        " enum=\"{}\"",
                        xml_attr("input_schema.enum", &values.join("|"))?
                    );
                }
                match &entry.node.description {
                    Some(d) => {
                        let _ = writeln!(
                            out,
                            ">{}</parameter>",
                            xml_text("input_schema.description", d)?
                        );
                    }
                    None => out.push_str("/>\n"),
                }
            }
            out.push_str("  </input_schema>\n");
        }

        if !ir.procedures.is_empty() {
            out.push_str("  <execution_steps>\n");
            for step in &ir.procedures {
                let _ = writeln!(
                    out,
                    "    <step order=\"{}\" critical=\"{}\">{}</step>",
                    step.order,
                    step.is_critical,
                    xml_text("procedures.instruction", &step.instruction)?
                );
            }
            out.push_str("  </execution_steps>\n");
        }

        if !ir.code_blocks.is_empty() {
            out.push_str("  <reference_code>\n");
            for code in &ir.code_blocks {
                out.push_str("    <code");
                if !code.language.is_empty() {
                    let _ = write!(
                        out,
                        " language=\"{}\"",
                        xml_attr("code_blocks.language", &code.language)?
                    );
                }
                let _ = writeln!(
                    out,
                    ">{}</code>",
                    xml_text("code_blocks.content", &code.content)?
                );
            }
            out.push_str("  </reference_code>\n");
        }

        if !ir.anti_skill_constraints.is_empty() {
            out.push_str("  <strict_constraints>\n");
            for c in &ir.anti_skill_constraints {
                let _ = writeln!(
                    out,
                    "    <anti_pattern source=\"{}\">\n      {}\n    </anti_pattern>",
                    xml_attr("anti_skill_constraints.source", &c.source)?,
                    xml_text("anti_skill_constraints.content", &c.content)?
                );
            }
            out.push_str("  </strict_constraints>\n");
        }

        if !ir.examples.is_empty() {
            out.push_str("  <examples>\n");
            for ex in &ir.examples {
                let _ = writeln!(
                    out,
                    "    <example>\n      <input>{}</input>\n      <output>{}</output>\n    </example>",
                    xml_text("examples.input", &ex.input)?,
                    xml_text("examples.output", &ex.output)?
                );
            }
            out.push_str("  </examples>\n");
        }

        out.push_str("</agent_skill>\n");
        Ok(RenderedDocument::new(out))
    }
}
