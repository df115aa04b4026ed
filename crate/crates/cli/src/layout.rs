//! The on-disk output layout:
//!
//! ```text
//! <out>/<target>/<skill>/SKILL.md        main document
//! <out>/<target>/<skill>/*.schema.yaml   schema assets (gemini)
//! <out>/<target>/manifest.json           routing manifest
//! <out>/<target>/build-info.json         compiler version, time, source hashes
//! <out>/ir/<skill>.skir.json             canonical IR (--emit-ir)
//! ```
//!
//! `clean` removes exactly these files and then any directory they leave empty.

use std::path::{Path, PathBuf};

use serde::Serialize;
use skillc_core::emitters::{generate_manifest, EmitterId};
use skillc_core::ir::serialize_ir;
use skillc_core::optimizer::ValidatedSkillIR;
use skillc_core::pipeline::CompiledSkill;

use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const BUILD_INFO_FILE: &str = "build-info.json";
pub const IR_DIR: &str = "ir";
pub const IR_SUFFIX: &str = ".skir.json";
pub const MAIN_DOCUMENT: &str = "SKILL.md";
pub const ASSET_SUFFIX: &str = ".schema.yaml";

#[derive(Debug, Serialize)]
struct BuildInfo<'a> {
    compiler: &'static str,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    compiled_at: Option<String>,
    skills: Vec<BuildInfoSkill<'a>>,
}

#[derive(Debug, Serialize)]
struct BuildInfoSkill<'a> {
    name: &'a str,
    source_hash: &'a str,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Writes every artifact, one manifest and one build-info per target.
/// `skills` must already be sorted by name.
pub fn write_build(
    out: &Path,
    targets: &[EmitterId],
    skills: &[&CompiledSkill],
    timestamp: Option<String>,
) -> Result<(), CliError> {
    for target in targets {
        let dir = out.join(target.as_str());
        for skill in skills {
            let Some(artifact) = skill.artifacts.get(target) else {
                continue;
            };
            let skill_dir = dir.join(&skill.validated.ir.name);
            write(&skill_dir.join(MAIN_DOCUMENT), &artifact.main_document)?;
            for (rel, contents) in &artifact.asset_files {
                write(&skill_dir.join(rel), contents)?;
            }
        }
        write_manifest(out, target, skills.iter().map(|s| &s.validated))?;
        let info = BuildInfo {
            compiler: "skillc",
            version: env!("CARGO_PKG_VERSION"),
            compiled_at: timestamp.clone(),
            skills: skills
                .iter()
                .map(|s| BuildInfoSkill {
                    name: &s.validated.ir.name,
                    source_hash: &s.validated.ir.source_hash,
                })
                .collect(),
        };
        write(&dir.join(BUILD_INFO_FILE), &pretty_json(&info))?;
    }
    Ok(())
}

pub fn write_manifest<'a>(
    out: &Path,
    target: &EmitterId,
    skills: impl IntoIterator<Item = &'a ValidatedSkillIR>,
) -> Result<PathBuf, CliError> {
    let manifest = generate_manifest(skills).map_err(|e| CliError::Config(e.to_string()))?;
    let path = out.join(target.as_str()).join(MANIFEST_FILE);
    write(&path, &manifest.to_json())?;
    Ok(path)
}

pub fn ir_path(out: &Path, name: &str) -> PathBuf {
    out.join(IR_DIR).join(format!("{name}{IR_SUFFIX}"))
}

pub fn write_ir(out: &Path, skill: &ValidatedSkillIR) -> Result<PathBuf, CliError> {
    let path = ir_path(out, &skill.ir.name);
    write(&path, &serialize_ir(&skill.ir))?;
    Ok(path)
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let Ok(entries) = std::fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    paths
}

fn has_suffix(path: &Path, suffix: &str) -> bool {
    path.is_file()
        && path
            .file_name()
            .is_some_and(|n| n.to_string_lossy().ends_with(suffix))
}

fn remove_if_empty(dir: &Path) {
    if std::fs::read_dir(dir).is_ok_and(|mut d| d.next().is_none()) {
        let _ = std::fs::remove_dir(dir);
    }
}

/// Removes layout files for `targets` plus emitted IR. Returns what was removed.
pub fn clean(out: &Path, targets: &[EmitterId]) -> Result<Vec<PathBuf>, CliError> {
    let mut doomed = Vec::new();
    for target in targets {
        let dir = out.join(target.as_str());
        for name in [MANIFEST_FILE, BUILD_INFO_FILE] {
            if dir.join(name).is_file() {
                doomed.push(dir.join(name));
            }
        }
        for skill_dir in files_in(&dir).into_iter().filter(|p| p.is_dir()) {
            for file in files_in(&skill_dir) {
                let is_main =
                    file.is_file() && file.file_name().is_some_and(|n| n == MAIN_DOCUMENT);
                if is_main || has_suffix(&file, ASSET_SUFFIX) {
                    doomed.push(file);
                }
            }
        }
    }
    doomed.extend(
        files_in(&out.join(IR_DIR))
            .into_iter()
            .filter(|p| has_suffix(p, IR_SUFFIX)),
    );

    for file in &doomed {
        std::fs::remove_file(file).map_err(|e| CliError::io(file, e))?;
    }
    for target in targets {
        let dir = out.join(target.as_str());
        for skill_dir in files_in(&dir).into_iter().filter(|p| p.is_dir()) {
            remove_if_empty(&skill_dir);
        }
        remove_if_empty(&dir);
    }
    remove_if_empty(&out.join(IR_DIR));
    Ok(doomed)
}
