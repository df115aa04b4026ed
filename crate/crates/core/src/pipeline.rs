//! The four-phase driver. Phases 1 to 3 run once per skill; the validated IR
//! is then shared by every registered emitter.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::diagnostics::{Diagnostic, InterceptionCategory, Severity};
use crate::emitters::{EmitError, EmittedArtifact, EmitterId, EmitterRegistry};
use crate::frontend::{parse_skill, SourceFile};
use crate::ir::build_ir_with_warnings;
use crate::optimizer::{
    optimize, CompilationInterception, RuleSet, SecurityBaseline, ValidatedSkillIR,
};

/// How many times each phase has run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PassCounts {
    pub parse: u64,
    pub build_ir: u64,
    pub optimize: u64,
    pub emit: u64,
}

#[derive(Debug, Default)]
struct PassCounters {
    parse: AtomicU64,
    build_ir: AtomicU64,
    optimize: AtomicU64,
    emit: AtomicU64,
}

impl PassCounters {
    fn bump(counter: &AtomicU64) {
        counter.fetch_add(1, Ordering::Relaxed);
    }

    fn snapshot(&self) -> PassCounts {
        PassCounts {
            parse: self.parse.load(Ordering::Relaxed),
            build_ir: self.build_ir.load(Ordering::Relaxed),
            optimize: self.optimize.load(Ordering::Relaxed),
            emit: self.emit.load(Ordering::Relaxed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledSkill {
    pub validated: ValidatedSkillIR,
    pub artifacts: BTreeMap<EmitterId, EmittedArtifact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkillFailure {
    #[error("intercepted ({}): {0}", .0.category)]
    Intercepted(CompilationInterception),
    #[error("emission failed: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Emission(Vec<EmitError>),
}

impl SkillFailure {
    pub fn interception_category(&self) -> Option<InterceptionCategory> {
        match self {
            SkillFailure::Intercepted(i) => Some(i.category),
            SkillFailure::Emission(_) => None,
        }
    }
}

/// Baseline, rules and targets for a batch. Immutable and shareable across
/// threads once built.
#[derive(Debug)]
pub struct Compiler {
    baseline: SecurityBaseline,
    rules: RuleSet,
    registry: EmitterRegistry,
    strict: bool,
    counters: PassCounters,
}

impl Compiler {
    pub fn new(baseline: SecurityBaseline, rules: RuleSet, registry: EmitterRegistry) -> Self {
        Compiler {
            baseline,
            rules,
            registry,
            strict: false,
            counters: PassCounters::default(),
        }
    }

    /// Built-in rules and all four built-in targets.
    pub fn with_baseline(baseline: SecurityBaseline) -> Self {
        Self::new(
            baseline,
            RuleSet::builtin(),
            EmitterRegistry::with_builtins(),
        )
    }

    /// In strict mode any warning intercepts the skill.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn registry(&self) -> &EmitterRegistry {
        &self.registry
    }

    pub fn baseline(&self) -> &SecurityBaseline {
        &self.baseline
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn pass_counts(&self) -> PassCounts {
        self.counters.snapshot()
    }

    /// Phases 1 to 3.
    pub fn check(&self, source: &SourceFile) -> Result<ValidatedSkillIR, CompilationInterception> {
        PassCounters::bump(&self.counters.parse);
        let ast = parse_skill(source).map_err(|e| {
            let mut diagnostics = e.warnings;
            diagnostics.push(e.diagnostic);
            CompilationInterception {
                category: InterceptionCategory::YamlViolation,
                diagnostics,
            }
        })?;
        let mut carried = ast.warnings.clone();

        PassCounters::bump(&self.counters.build_ir);
        let built = build_ir_with_warnings(&ast).map_err(|e| {
            let mut diagnostics = carried.clone();
            diagnostics.push(e.diagnostic);
            CompilationInterception {
                category: InterceptionCategory::SchemaViolation,
                diagnostics,
            }
        })?;
        carried.extend(built.warnings);

        PassCounters::bump(&self.counters.optimize);
        let mut validated = optimize(&built.ir, &self.baseline, &self.rules).map_err(|mut e| {
            carried.append(&mut e.diagnostics);
            CompilationInterception {
                category: e.category,
                diagnostics: std::mem::take(&mut carried),
            }
        })?;
        carried.append(&mut validated.diagnostics);
        validated.diagnostics = carried;

        if self.strict
            && validated
                .diagnostics
                .iter()
                .any(|d| d.severity == Severity::Warning)
        {
            let promoted = validated
                .diagnostics
                .into_iter()
                .map(|d| match d.severity {
                    Severity::Warning => Diagnostic {
                        severity: Severity::Fatal,
                        ..d
                    },
                    _ => d,
                })
                .collect();
            return Err(CompilationInterception::from_diagnostics(promoted));
        }
        Ok(validated)
    }

    /// Phase 4 over every registered target.
    pub fn emit(
        &self,
        validated: &ValidatedSkillIR,
    ) -> Result<BTreeMap<EmitterId, EmittedArtifact>, Vec<EmitError>> {
        let mut artifacts = BTreeMap::new();
        let mut errors = Vec::new();
        for (id, result) in self.registry.emit_all(validated) {
            PassCounters::bump(&self.counters.emit);
            match result {
                Ok(a) => {
                    artifacts.insert(id, a);
                }
                Err(e) => errors.push(e),
            }
        }
        if errors.is_empty() {
            Ok(artifacts)
        } else {
            Err(errors)
        }
    }

    /// All four phases.
    pub fn compile(&self, source: &SourceFile) -> Result<CompiledSkill, SkillFailure> {
        let validated = self.check(source).map_err(SkillFailure::Intercepted)?;
        let artifacts = self.emit(&validated).map_err(SkillFailure::Emission)?;
        Ok(CompiledSkill {
            validated,
            artifacts,
        })
    }
}
