use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use skillc_core::diagnostics::{Diagnostic, Severity};
use skillc_core::frontend::SourceFile;
use skillc_core::metrics::CompileReport;
use skillc_core::optimizer::CompilationInterception;
use skillc_core::pipeline::{CompiledSkill, Compiler, SkillFailure};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phases {
    /// Phases 1 to 3.
    Check,
    /// All four phases.
    Build,
}

/// One skill's result. In check mode `artifacts` is always empty.
#[derive(Debug)]
pub struct SkillResult {
    pub path: PathBuf,
    pub source: SourceFile,
    pub outcome: Result<CompiledSkill, SkillFailure>,
    pub duration_ms: f64,
}

impl SkillResult {
    pub fn name(&self) -> Option<&str> {
        self.outcome
            .as_ref()
            .ok()
            .map(|c| c.validated.ir.name.as_str())
    }

    pub fn diagnostics(&self) -> Vec<&Diagnostic> {
        match &self.outcome {
            Ok(c) => c.validated.diagnostics.iter().collect(),
            Err(SkillFailure::Intercepted(i)) => i.diagnostics.iter().collect(),
            Err(SkillFailure::Emission(_)) => Vec::new(),
        }
    }

    pub fn warning_count(&self) -> usize {
        self.diagnostics()
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .count()
    }

    pub fn report(&self) -> CompileReport {
        CompileReport::for_outcome(&self.source, &self.outcome, self.duration_ms)
    }

    fn sort_key(&self) -> (String, PathBuf) {
        let name = self
            .name()
            .map_or_else(|| self.path.to_string_lossy().into_owned(), str::to_owned);
        (name, self.path.clone())
    }
}

fn compile_one(path: &Path, compiler: &Compiler, phases: Phases) -> Result<SkillResult, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let label = path.to_string_lossy();
    let source = match SourceFile::from_bytes(label.clone(), bytes.clone()) {
        Ok(s) => s,
        Err(e) => {
            let mut diagnostics = e.warnings.clone();
            diagnostics.push(e.diagnostic.clone());
            return Ok(SkillResult {
                path: path.to_path_buf(),
                source: SourceFile::from_text(label, &String::from_utf8_lossy(&bytes)),
                outcome: Err(SkillFailure::Intercepted(CompilationInterception {
                    category: e.category(),
                    diagnostics,
                })),
                duration_ms: 0.0,
            });
        }
    };
    let start = Instant::now();
    let outcome = match phases {
        Phases::Build => compiler.compile(&source),
        Phases::Check => compiler
            .check(&source)
            .map(|validated| CompiledSkill {
                validated,
                artifacts: BTreeMap::new(),
            })
            .map_err(SkillFailure::Intercepted),
    };
    Ok(SkillResult {
        path: path.to_path_buf(),
        source,
        outcome,
        duration_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

/// Compiles `paths` on `jobs` threads. Results are ordered by skill name,
/// then path, whatever the thread count.
pub fn run(
    paths: &[PathBuf],
    compiler: &Compiler,
    phases: Phases,
    jobs: usize,
) -> Result<Vec<SkillResult>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    let mut results = pool.install(|| {
        paths
            .par_iter()
            .map(|p| compile_one(p, compiler, phases))
            .collect::<Result<Vec<_>, _>>()
    })?;
    results.sort_by_cached_key(SkillResult::sort_key);
    Ok(results)
}

/// Names claimed by more than one compiled skill.
pub fn duplicate_names(results: &[SkillResult]) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for name in results.iter().filter_map(SkillResult::name) {
        *counts.entry(name).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(name, _)| name.to_owned())
        .collect()
}
