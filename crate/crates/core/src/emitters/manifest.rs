use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{SecurityLevel, SkillIR};
use crate::optimizer::ValidatedSkillIR;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// The routing view of a skill. Nothing beyond these four fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    pub description: String,
    pub security_level: SecurityLevel,
    pub hitl_required: bool,
}

impl ManifestEntry {
    pub fn from_ir(ir: &SkillIR) -> Self {
        ManifestEntry {
            name: ir.name.clone(),
            description: ir.description.clone(),
            security_level: ir.security_level,
            hitl_required: ir.hitl_required,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoutingManifest {
    pub schema_version: u32,
    #[serde(rename = "skills")]
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate skill names in manifest: {}", .0.join(", "))]
pub struct ManifestError(pub Vec<String>);

impl RoutingManifest {
    /// Sorts entries by name and rejects duplicates.
    pub fn from_entries(mut entries: Vec<ManifestEntry>) -> Result<Self, ManifestError> {
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &entries {
            *counts.entry(&e.name).or_default() += 1;
        }
        let dups: Vec<String> = counts
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(name, _)| name.to_owned())
            .collect();
        if !dups.is_empty() {
            return Err(ManifestError(dups));
        }
        Ok(RoutingManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            entries,
        })
    }

    /// Two-space indented JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("manifest serialization is infallible");
        s.push('\n');
        s
    }
}

pub fn generate_manifest<'a, I>(skills: I) -> Result<RoutingManifest, ManifestError>
where
    I: IntoIterator<Item = &'a ValidatedSkillIR>,
{
    RoutingManifest::from_entries(
        skills
            .into_iter()
            .map(|s| ManifestEntry::from_ir(&s.ir))
            .collect(),
    )
}
