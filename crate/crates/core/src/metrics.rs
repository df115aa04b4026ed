//! Static size metrics and compile timing.
//!
//! Token counts use a fixed heuristic of one token per four bytes, rounded
//! up. It is deterministic and needs no tokenizer, but it will not match any
//! provider's own counts.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::InterceptionCategory;
use crate::emitters::{EmittedArtifact, EmitterId};
use crate::frontend::SourceFile;
use crate::pipeline::{CompiledSkill, Compiler, SkillFailure};

pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Complexity {
    Simple,
    Medium,
    Complex,
}

pub const SIMPLE_BELOW: usize = 500;
pub const COMPLEX_ABOVE: usize = 1500;

/// Below 500 is simple, 500 to 1500 inclusive is medium, above is complex.
pub fn classify_complexity(source_tokens: usize) -> Complexity {
    if source_tokens < SIMPLE_BELOW {
        Complexity::Simple
    } else if source_tokens <= COMPLEX_ABOVE {
        Complexity::Medium
    } else {
        Complexity::Complex
    }
}

/// Relative size change of a compiled artifact against its source.
pub fn expansion_overhead(target_tokens: usize, source_tokens: usize) -> f64 {
    (target_tokens as f64 - source_tokens as f64) / source_tokens as f64
}

/// Tokens of the main document plus every asset file.
pub fn artifact_tokens(artifact: &EmittedArtifact) -> usize {
    estimate_tokens(&artifact.main_document)
        + artifact
            .asset_files
            .iter()
            .map(|(_, content)| estimate_tokens(content))
            .sum::<usize>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub skill_name: String,
    pub complexity: Complexity,
    pub source_tokens: usize,
    pub per_target_tokens: BTreeMap<EmitterId, usize>,
    pub per_target_overhead: BTreeMap<EmitterId, f64>,
    pub duration_ms: f64,
    pub triggered_rule_ids: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interception: Option<InterceptionCategory>,
}

impl CompileReport {
    /// Token fields for a source and its artifacts; timing is left at zero.
    pub fn from_artifacts<'a>(
        skill_name: &str,
        source: &SourceFile,
        artifacts: impl IntoIterator<Item = &'a EmittedArtifact>,
        triggered_rule_ids: BTreeSet<String>,
    ) -> Self {
        let source_tokens = estimate_tokens(source.content());
        let per_target_tokens: BTreeMap<_, _> = artifacts
            .into_iter()
            .map(|a| (a.target.clone(), artifact_tokens(a)))
            .collect();
        let per_target_overhead = per_target_tokens
            .iter()
            .map(|(id, t)| (id.clone(), expansion_overhead(*t, source_tokens)))
            .collect();
        CompileReport {
            skill_name: skill_name.to_owned(),
            complexity: classify_complexity(source_tokens),
            source_tokens,
            per_target_tokens,
            per_target_overhead,
            duration_ms: 0.0,
            triggered_rule_ids,
            interception: None,
        }
    }
}

impl CompileReport {
    /// Report for an already-finished compile of `source` that took `duration_ms`.
    /// Intercepted skills are reported under their source path.
    pub fn for_outcome(
        source: &SourceFile,
        outcome: &Result<CompiledSkill, SkillFailure>,
        duration_ms: f64,
    ) -> Self {
        let mut report = match outcome {
            Ok(c) => CompileReport::from_artifacts(
                &c.validated.ir.name,
                source,
                c.artifacts.values(),
                c.validated.triggered_rule_ids.clone(),
            ),
            Err(failure) => {
                let source_tokens = estimate_tokens(source.content());
                CompileReport {
                    skill_name: source.path().to_owned(),
                    complexity: classify_complexity(source_tokens),
                    source_tokens,
                    per_target_tokens: BTreeMap::new(),
                    per_target_overhead: BTreeMap::new(),
                    duration_ms: 0.0,
                    triggered_rule_ids: BTreeSet::new(),
                    interception: failure.interception_category(),
                }
            }
        };
        report.duration_ms = duration_ms;
        report
    }
}

/// Compiles `source` through all four phases and reports sizes and the
/// wall-clock time spent. Nothing is written to disk.
pub fn measure_compile(source: &SourceFile, compiler: &Compiler) -> CompileReport {
    let start = Instant::now();
    let result = compiler.compile(source);
    let duration_ms = start.elapsed().as_secs_f64() * 1000.0;
    CompileReport::for_outcome(source, &result, duration_ms)
}
