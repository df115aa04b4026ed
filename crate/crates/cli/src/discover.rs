use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::CliError;

pub const SKILL_FILE: &str = "SKILL.md";

/// Every `SKILL.md` under `inputs`, sorted and deduplicated. Hidden
/// directories and anything inside `exclude` are skipped.
pub fn discover(inputs: &[PathBuf], exclude: &Path) -> Result<Vec<PathBuf>, CliError> {
    let excluded = exclude.canonicalize().ok();
    let mut found = Vec::new();
    for input in inputs {
        if !input.exists() {
            return Err(CliError::Usage(format!(
                "input path `{}` does not exist",
                input.display()
            )));
        }
        if input.is_file() {
            found.push(input.clone());
            continue;
        }
        let walker = WalkDir::new(input)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| {
                let hidden = e.depth() > 0 && e.file_name().to_string_lossy().starts_with('.');
                let inside_out = e.file_type().is_dir()
                    && excluded
                        .as_ref()
                        .is_some_and(|x| e.path().canonicalize().is_ok_and(|p| p == *x));
                !hidden && !inside_out
            });
        for entry in walker {
            let entry = entry
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
            if entry.file_type().is_file() && entry.file_name() == SKILL_FILE {
                found.push(entry.into_path());
            }
        }
    }
    found.sort();
    found.dedup();
    Ok(found)
}
