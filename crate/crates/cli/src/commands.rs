use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde_json::{json, Value};
use skillc_core::optimizer::is_kebab_identifier;
use skillc_core::pipeline::{CompiledSkill, Compiler, SkillFailure};

use crate::args::{BuildArgs, CheckArgs, CleanArgs, Format, IndexArgs, InitArgs, PipelineArgs};
use crate::batch::{self, Phases, SkillResult};
use crate::config::{CliConfig, FileConfig};
use crate::discover::{discover, SKILL_FILE};
use crate::layout;
use crate::output::{self, Summary};
use crate::template::skill_template;
use crate::CliError;

fn compiler(cfg: &CliConfig) -> Result<Compiler, CliError> {
    Ok(Compiler::new(cfg.baseline()?, cfg.rules()?, cfg.registry()?).strict(cfg.strict))
}

fn compile_all(cfg: &CliConfig, phases: Phases) -> Result<Vec<SkillResult>, CliError> {
    let compiler = compiler(cfg)?;
    let paths = discover(&cfg.input_paths, &cfg.out_dir)?;
    let results = batch::run(&paths, &compiler, phases, cfg.jobs)?;
    let dups = batch::duplicate_names(&results);
    if !dups.is_empty() {
        return Err(CliError::Usage(format!(
            "duplicate skill names: {}",
            dups.join(", ")
        )));
    }
    Ok(results)
}

fn compiled(results: &[SkillResult]) -> Vec<&CompiledSkill> {
    results
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect()
}

fn write_ir(cfg: &CliConfig, results: &[SkillResult]) -> Result<Vec<PathBuf>, CliError> {
    compiled(results)
        .into_iter()
        .map(|c| layout::write_ir(&cfg.out_dir, &c.validated))
        .collect()
}

fn paths_json(paths: &[PathBuf]) -> Value {
    paths
        .iter()
        .map(|p| Value::from(p.to_string_lossy()))
        .collect()
}

pub fn build(file: &FileConfig, format: Option<Format>, args: &BuildArgs) -> Result<u8, CliError> {
    let mut cfg = CliConfig::new(file, format)
        .with_pipeline(&args.pipeline)?
        .with_out(&args.out)
        .with_targets(&args.targets, file)?;
    cfg.strict |= args.strict;
    cfg.emit_ir = args.emit_ir;
    cfg.report_path = args.report.clone();
    cfg.timestamps = !args.no_timestamps;

    let results = compile_all(&cfg, Phases::Build)?;
    let timestamp = cfg
        .timestamps
        .then(|| Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true));
    layout::write_build(&cfg.out_dir, &cfg.targets, &compiled(&results), timestamp)?;
    if cfg.emit_ir {
        write_ir(&cfg, &results)?;
    }
    if let Some(path) = &cfg.report_path {
        let reports: Vec<_> = results.iter().map(SkillResult::report).collect();
        let mut text = serde_json::to_string_pretty(&reports).expect("reports serialize");
        text.push('\n');
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    output::print_batch(
        cfg.format,
        "build",
        &results,
        json!({ "out": cfg.out_dir.to_string_lossy() }),
    );
    Ok(Summary::of(&results).exit_code())
}

pub fn check(
    file: &FileConfig,
    format: Option<Format>,
    args: &CheckArgs,
    command: &str,
    force_strict: bool,
) -> Result<u8, CliError> {
    let mut cfg = CliConfig::new(file, format)
        .with_pipeline(&args.pipeline)?
        .with_out(&args.out);
    cfg.strict |= args.strict || force_strict;
    cfg.emit_ir = args.emit_ir;

    let results = compile_all(&cfg, Phases::Check)?;
    let written = if cfg.emit_ir {
        write_ir(&cfg, &results)?
    } else {
        Vec::new()
    };
    output::print_batch(
        cfg.format,
        command,
        &results,
        json!({ "ir": paths_json(&written) }),
    );
    Ok(Summary::of(&results).exit_code())
}

pub fn init(format: Format, args: &InitArgs) -> Result<u8, CliError> {
    if !is_kebab_identifier(&args.name) {
        return Err(CliError::Usage(format!(
            "skill name `{}` must be lowercase kebab-case, e.g. `my-skill`",
            args.name
        )));
    }
    let dir = args.dir.join(&args.name);
    let path = dir.join(SKILL_FILE);
    if path.exists() {
        return Err(CliError::Usage(format!(
            "{} already exists",
            path.display()
        )));
    }
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    std::fs::write(&path, skill_template(&args.name)).map_err(|e| CliError::io(&path, e))?;
    match format {
        Format::Human => println!("created {}", path.display()),
        Format::Json => println!(
            "{}",
            json!({ "command": "init", "created": path.to_string_lossy() })
        ),
    }
    Ok(crate::EXIT_OK)
}

pub fn list(
    file: &FileConfig,
    format: Option<Format>,
    args: &PipelineArgs,
) -> Result<u8, CliError> {
    let cfg = CliConfig::new(file, format).with_pipeline(args)?;
    let results = compile_all(&cfg, Phases::Check)?;
    match cfg.format {
        Format::Human => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| match &r.outcome {
                    Ok(c) => {
                        let ir = &c.validated.ir;
                        let hitl = if ir.hitl_required { " (hitl)" } else { "" };
                        vec![
                            ir.name.clone(),
                            ir.version.clone(),
                            format!("{}{hitl}", ir.security_level),
                            "ok".to_owned(),
                        ]
                    }
                    Err(f) => vec![
                        r.path.display().to_string(),
                        "-".to_owned(),
                        "-".to_owned(),
                        match f {
                            SkillFailure::Intercepted(i) => format!("intercepted: {}", i.category),
                            SkillFailure::Emission(_) => "intercepted: emission".to_owned(),
                        },
                    ],
                })
                .collect();
            println!(
                "{}",
                output::table(&["NAME", "VERSION", "SECURITY", "STATUS"], &rows)
            );
        }
        Format::Json => {
            let skills: Vec<Value> = results
                .iter()
                .map(|r| {
                    let mut v = output::skill_json(r);
                    if let Ok(c) = &r.outcome {
                        let ir = &c.validated.ir;
                        v["version"] = json!(ir.version);
                        v["security_level"] = json!(ir.security_level);
                        v["hitl_required"] = json!(ir.hitl_required);
                    }
                    v
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "command": "list", "skills": skills }))
                    .unwrap()
            );
        }
    }
    Ok(Summary::of(&results).exit_code())
}

pub fn index(file: &FileConfig, format: Option<Format>, args: &IndexArgs) -> Result<u8, CliError> {
    let cfg = CliConfig::new(file, format)
        .with_pipeline(&args.pipeline)?
        .with_out(&args.out)
        .with_targets(&args.targets, file)?;
    let results = compile_all(&cfg, Phases::Check)?;
    let skills = compiled(&results);
    let mut written = Vec::new();
    for target in &cfg.targets {
        written.push(layout::write_manifest(
            &cfg.out_dir,
            target,
            skills.iter().map(|c| &c.validated),
        )?);
    }
    if cfg.format == Format::Human {
        for path in &written {
            println!("wrote {}", path.display());
        }
    }
    output::print_batch(
        cfg.format,
        "index",
        &results,
        json!({ "manifests": paths_json(&written) }),
    );
    Ok(Summary::of(&results).exit_code())
}

pub fn clean(file: &FileConfig, format: Option<Format>, args: &CleanArgs) -> Result<u8, CliError> {
    let cfg = CliConfig::new(file, format)
        .with_out(&args.out)
        .with_targets(&args.targets, file)?;
    let removed = layout::clean(&cfg.out_dir, &cfg.targets)?;
    match cfg.format {
        Format::Human => println!(
            "removed {} files from {}",
            removed.len(),
            display(&cfg.out_dir)
        ),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(
                &json!({ "command": "clean", "removed": paths_json(&removed) })
            )
            .unwrap()
        ),
    }
    Ok(crate::EXIT_OK)
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
