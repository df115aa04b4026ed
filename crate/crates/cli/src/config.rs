//! `skillc.toml`, baseline and rule files, and how they combine with flags
//! and environment variables.
//!
//! Precedence is flags, then `SKILLC_*` variables, then the config file,
//! then built-in defaults. Relative paths in the config file are resolved
//! against the file's directory; everything else against the working
//! directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use skillc_core::emitters::{EmitterId, EmitterRegistry};
use skillc_core::optimizer::{InjectionRule, RuleSet, SecurityBaseline};

use crate::args::{Format, OutArgs, PipelineArgs, TargetArgs};
use crate::CliError;

pub const DEFAULT_CONFIG: &str = "skillc.toml";
pub const DEFAULT_OUT: &str = "dist";

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub targets: Option<Vec<String>>,
    pub baseline: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict: Option<bool>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    /// Reads `explicit`, or `./skillc.toml` when present. Paths inside are
    /// made relative to the file's directory.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None if Path::new(DEFAULT_CONFIG).is_file() => PathBuf::from(DEFAULT_CONFIG),
            None => return Ok(FileConfig::default()),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        cfg.inputs = cfg.inputs.into_iter().map(rebase).collect();
        cfg.out = cfg.out.map(rebase);
        cfg.baseline = cfg.baseline.map(rebase);
        cfg.rules = cfg.rules.map(rebase);
        Ok(cfg)
    }
}

/// Settings for one command after all sources are merged.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub input_paths: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub targets: Vec<EmitterId>,
    pub baseline_path: Option<PathBuf>,
    pub rules_path: Option<PathBuf>,
    pub format: Format,
    pub strict: bool,
    pub emit_ir: bool,
    pub report_path: Option<PathBuf>,
    pub jobs: usize,
    pub timestamps: bool,
}

impl CliConfig {
    pub fn new(file: &FileConfig, format: Option<Format>) -> Self {
        CliConfig {
            input_paths: if file.inputs.is_empty() {
                vec![PathBuf::from(".")]
            } else {
                file.inputs.clone()
            },
            out_dir: file
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            targets: EmitterId::BUILTINS.to_vec(),
            baseline_path: file.baseline.clone(),
            rules_path: file.rules.clone(),
            format: format.or(file.format).unwrap_or(Format::Human),
            strict: file.strict.unwrap_or(false),
            emit_ir: false,
            report_path: None,
            jobs: file.jobs.unwrap_or_else(default_jobs),
            timestamps: true,
        }
    }

    pub fn with_pipeline(mut self, args: &PipelineArgs) -> Result<Self, CliError> {
        if !args.inputs.is_empty() {
            self.input_paths = args.inputs.clone();
        }
        if args.baseline.is_some() {
            self.baseline_path = args.baseline.clone();
        }
        if args.rules.is_some() {
            self.rules_path = args.rules.clone();
        }
        if let Some(jobs) = args.jobs {
            self.jobs = jobs;
        }
        if self.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(self)
    }

    pub fn with_out(mut self, args: &OutArgs) -> Self {
        if let Some(out) = &args.out {
            self.out_dir = out.clone();
        }
        self
    }

    pub fn with_targets(mut self, args: &TargetArgs, file: &FileConfig) -> Result<Self, CliError> {
        if let Some(names) = args.targets.as_ref().or(file.targets.as_ref()) {
            self.targets = parse_targets(names)?;
        }
        Ok(self)
    }

    pub fn registry(&self) -> Result<EmitterRegistry, CliError> {
        EmitterRegistry::with_builtins()
            .restricted_to(&self.targets)
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn baseline(&self) -> Result<SecurityBaseline, CliError> {
        let Some(path) = &self.baseline_path else {
            return Ok(SecurityBaseline::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let baseline: SecurityBaseline = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        baseline
            .validate()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(baseline)
    }

    /// Built-in rules, extended or overridden by the rules file.
    pub fn rules(&self) -> Result<RuleSet, CliError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RulesFile {
            #[serde(default, rename = "rule")]
            rules: Vec<InjectionRule>,
        }
        let Some(path) = &self.rules_path else {
            return Ok(RuleSet::builtin());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file: RulesFile = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        RuleSet::builtin()
            .extended(file.rules)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

pub fn parse_targets(names: &[String]) -> Result<Vec<EmitterId>, CliError> {
    let mut targets: Vec<EmitterId> = Vec::new();
    for name in names.iter().map(|n| n.trim()).filter(|n| !n.is_empty()) {
        let id: EmitterId = name
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid target id `{name}`")))?;
        if !EmitterId::BUILTINS.contains(&id) {
            return Err(CliError::Usage(format!(
                "unknown target `{name}`; available: claude, codex, gemini, kimi"
            )));
        }
        if !targets.contains(&id) {
            targets.push(id);
        }
    }
    if targets.is_empty() {
        return Err(CliError::Usage("at least one target is required".into()));
    }
    Ok(targets)
}
