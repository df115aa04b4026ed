use serde_json::{json, Value};
use skillc_core::diagnostics::{render_diagnostic, Severity};
use skillc_core::pipeline::SkillFailure;

use crate::args::Format;
use crate::batch::SkillResult;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub compiled: usize,
    pub intercepted: usize,
    pub warnings: usize,
}

impl Summary {
    pub fn of(results: &[SkillResult]) -> Self {
        Summary {
            compiled: results.iter().filter(|r| r.outcome.is_ok()).count(),
            intercepted: results.iter().filter(|r| r.outcome.is_err()).count(),
            warnings: results.iter().map(SkillResult::warning_count).sum(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "compiled {}, intercepted {}, warnings {}",
            self.compiled, self.intercepted, self.warnings
        )
    }

    pub fn exit_code(&self) -> u8 {
        if self.intercepted > 0 {
            crate::EXIT_INTERCEPTED
        } else {
            crate::EXIT_OK
        }
    }
}

fn status(r: &SkillResult) -> (&'static str, Option<String>) {
    match &r.outcome {
        Ok(_) => ("compiled", None),
        Err(SkillFailure::Intercepted(i)) => ("intercepted", Some(i.category.to_string())),
        Err(SkillFailure::Emission(_)) => ("intercepted", Some("emission_failure".to_owned())),
    }
}

pub fn skill_json(r: &SkillResult) -> Value {
    let (status, category) = status(r);
    let mut v = json!({
        "path": r.path.to_string_lossy(),
        "name": r.name(),
        "status": status,
        "category": category,
        "diagnostics": r.diagnostics(),
    });
    if let Err(SkillFailure::Emission(errors)) = &r.outcome {
        v["emission_errors"] = errors.iter().map(ToString::to_string).collect();
    }
    v
}

/// Writes per-skill findings to stderr in human mode.
pub fn print_findings(results: &[SkillResult]) {
    for r in results {
        let shown: Vec<_> = r
            .diagnostics()
            .into_iter()
            .filter(|d| d.severity != Severity::Info)
            .collect();
        match &r.outcome {
            Ok(_) if shown.is_empty() => continue,
            Ok(_) => eprintln!("{}:", r.path.display()),
            Err(SkillFailure::Intercepted(i)) => {
                eprintln!("intercepted {} ({})", r.path.display(), i.category)
            }
            Err(SkillFailure::Emission(errors)) => {
                eprintln!("intercepted {} (emission failure)", r.path.display());
                for e in errors {
                    eprintln!("  {e}");
                }
            }
        }
        for d in shown {
            for line in render_diagnostic(d, Some(&r.source)).lines() {
                eprintln!("  {line}");
            }
        }
    }
}

/// Prints the outcome of a compiling command in the chosen format.
pub fn print_batch(format: Format, command: &str, results: &[SkillResult], extra: Value) {
    let summary = Summary::of(results);
    match format {
        Format::Human => {
            print_findings(results);
            println!("{}", summary.line());
        }
        Format::Json => {
            let mut doc = json!({
                "command": command,
                "compiled": summary.compiled,
                "intercepted": summary.intercepted,
                "warnings": summary.warnings,
                "skills": results.iter().map(skill_json).collect::<Vec<_>>(),
            });
            if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
                doc.extend(extra);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("JSON values serialize")
            );
        }
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let render = |cells: Vec<&str>| {
        let mut line = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}  "));
            }
        }
        line.trim_end().to_owned()
    };
    let mut out = render(header.to_vec());
    for row in rows {
        out.push('\n');
        out.push_str(&render(row.iter().map(String::as_str).collect()));
    }
    out
}
