//! The `init` scaffold. Its wording avoids every built-in trigger keyword so
//! a fresh skill compiles with no injected constraints.

pub fn skill_template(name: &str) -> String {
    let title = name
        .split('-')
        .map(|w| {
            let mut c = w.chars();
            c.next()
                .map(|f| f.to_ascii_uppercase().to_string() + c.as_str())
                .unwrap_or_default()
        })
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        r#"---
name: {name}
version: 0.1.0
description: Describe in one sentence what {name} does and when to use it
mcp_servers: []
permissions:
  - kind: filesystem
    scope: "./**"
    read_only: true
---

# {title}

Explain the task this skill performs and the situations it is meant for.

## Input Schema

```json
{{
  "type": "object",
  "properties": {{
    "path": {{ "type": "string", "description": "File to work on" }}
  }},
  "required": ["path"]
}}
```

## Procedures

1. Read the file named by `path`.
2. Summarise its contents for the user.
3. Confirm the summary with the user before acting on it. **[CRITICAL]**

## Examples

**Input:** `{{"path": "./notes.txt"}}`
**Output:** A short summary of notes.txt.
"#
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use skillc_core::frontend::SourceFile;
    use skillc_core::pipeline::Compiler;

    #[test]
    fn scaffold_compiles_cleanly() {
        let text = skill_template("my-new-skill");
        let compiled = Compiler::with_baseline(Default::default())
            .compile(&SourceFile::from_text("SKILL.md", &text))
            .unwrap();
        let ir = &compiled.validated.ir;
        assert_eq!(ir.name, "my-new-skill");
        assert!(
            ir.anti_skill_constraints.is_empty(),
            "{:?}",
            ir.anti_skill_constraints
        );
        assert_eq!(ir.procedures.len(), 3);
        assert!(
            compiled.validated.diagnostics.is_empty(),
            "{:?}",
            compiled.validated.diagnostics
        );
    }
}
