//! Phase 4: render a validated IR into framework-native documents.
//!
//! Every target implements [`Emitter`] and is looked up through an
//! [`EmitterRegistry`]. Adding a target means registering one more emitter;
//! the earlier phases never see it.

mod claude;
mod codex;
mod gemini;
mod kimi;
mod manifest;
pub(crate) mod markup;

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ir::SkillIR;
use crate::optimizer::{is_kebab_identifier, ValidatedSkillIR};

pub use claude::ClaudeEmitter;
pub use codex::CodexEmitter;
pub use gemini::GeminiEmitter;
pub use kimi::KimiEmitter;
pub use manifest::{
    generate_manifest, ManifestEntry, ManifestError, RoutingManifest, MANIFEST_SCHEMA_VERSION,
};

/// Kebab-case name of an emission target.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmitterId(Cow<'static, str>);

impl EmitterId {
    pub const CLAUDE: EmitterId = EmitterId(Cow::Borrowed("claude"));
    pub const CODEX: EmitterId = EmitterId(Cow::Borrowed("codex"));
    pub const GEMINI: EmitterId = EmitterId(Cow::Borrowed("gemini"));
    pub const KIMI: EmitterId = EmitterId(Cow::Borrowed("kimi"));

    pub const BUILTINS: [EmitterId; 4] = [Self::CLAUDE, Self::CODEX, Self::GEMINI, Self::KIMI];

    pub fn new(id: impl Into<String>) -> Result<Self, InvalidEmitterId> {
        let id = id.into();
        if is_kebab_identifier(&id) {
            Ok(EmitterId(Cow::Owned(id)))
        } else {
            Err(InvalidEmitterId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EmitterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for EmitterId {
    type Err = InvalidEmitterId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EmitterId::new(s)
    }
}

impl Serialize for EmitterId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for EmitterId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        EmitterId::new(String::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("emitter id `{0}` must be a lowercase kebab-case identifier")]
pub struct InvalidEmitterId(pub String);

/// What an emitter produces before the registry packages it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RenderedDocument {
    pub main_document: String,
    /// `(relative path, content)` pairs written next to the main document.
    pub asset_files: Vec<(String, String)>,
}

impl RenderedDocument {
    pub fn new(main_document: String) -> Self {
        RenderedDocument {
            main_document,
            asset_files: Vec::new(),
        }
    }
}

/// An emitter could not represent some IR field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot render `{field}`: {message}")]
pub struct RenderError {
    pub field: String,
    pub message: String,
}

impl RenderError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        RenderError {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// A target backend. Implementations are stateless and must be
/// deterministic: equal IRs give byte-identical documents.
pub trait Emitter: Send + Sync {
    fn render(&self, ir: &SkillIR) -> Result<RenderedDocument, RenderError>;
}

impl<F> Emitter for F
where
    F: Fn(&SkillIR) -> Result<RenderedDocument, RenderError> + Send + Sync,
{
    fn render(&self, ir: &SkillIR) -> Result<RenderedDocument, RenderError> {
        self(ir)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmittedArtifact {
    pub target: EmitterId,
    pub main_document: String,
    pub asset_files: Vec<(String, String)>,
    pub manifest_entry: ManifestEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("no emitter registered for target `{0}`")]
    UnknownTarget(EmitterId),
    #[error("target `{target}`: skill `{skill}` carries fatal diagnostics")]
    NotValidated { target: EmitterId, skill: String },
    #[error("target `{target}`: {source}")]
    Render {
        target: EmitterId,
        source: RenderError,
    },
    #[error("target `{target}`: invalid asset path `{path}`: {reason}")]
    InvalidAsset {
        target: EmitterId,
        path: String,
        reason: &'static str,
    },
}

impl EmitError {
    pub fn target(&self) -> &EmitterId {
        match self {
            EmitError::UnknownTarget(t) => t,
            EmitError::NotValidated { target, .. }
            | EmitError::Render { target, .. }
            | EmitError::InvalidAsset { target, .. } => target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("an emitter is already registered for target `{0}`")]
pub struct DuplicateEmitter(pub EmitterId);

fn asset_path_problem(path: &str) -> Option<&'static str> {
    if path.is_empty() {
        Some("empty path")
    } else if path.starts_with('/') || path.starts_with('\\') || path.contains(':') {
        Some("path must be relative")
    } else if path
        .split(['/', '\\'])
        .any(|seg| seg == ".." || seg == "." || seg.is_empty())
    {
        Some("path must not contain empty, `.` or `..` segments")
    } else if path == "SKILL.md" {
        Some("path collides with the main document")
    } else {
        None
    }
}

fn with_trailing_newline(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

/// Targets by id. Shared read-only once built.
#[derive(Clone, Default)]
pub struct EmitterRegistry {
    emitters: BTreeMap<EmitterId, Arc<dyn Emitter>>,
}

impl fmt::Debug for EmitterRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.emitters.keys()).finish()
    }
}

impl EmitterRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// claude, codex, gemini and kimi.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        let builtins: [(EmitterId, Arc<dyn Emitter>); 4] = [
            (EmitterId::CLAUDE, Arc::new(ClaudeEmitter)),
            (EmitterId::CODEX, Arc::new(CodexEmitter)),
            (EmitterId::GEMINI, Arc::new(GeminiEmitter)),
            (EmitterId::KIMI, Arc::new(KimiEmitter)),
        ];
        for (id, e) in builtins {
            r.emitters.insert(id, e);
        }
        r
    }

    pub fn register(
        &mut self,
        id: EmitterId,
        emitter: impl Emitter + 'static,
    ) -> Result<&mut Self, DuplicateEmitter> {
        if self.emitters.contains_key(&id) {
            return Err(DuplicateEmitter(id));
        }
        self.emitters.insert(id, Arc::new(emitter));
        Ok(self)
    }

    /// Keeps only the listed targets.
    pub fn restricted_to(&self, ids: &[EmitterId]) -> Result<Self, EmitError> {
        let mut emitters = BTreeMap::new();
        for id in ids {
            let e = self
                .emitters
                .get(id)
                .ok_or_else(|| EmitError::UnknownTarget(id.clone()))?;
            emitters.insert(id.clone(), Arc::clone(e));
        }
        Ok(EmitterRegistry { emitters })
    }

    pub fn ids(&self) -> impl Iterator<Item = &EmitterId> {
        self.emitters.keys()
    }

    pub fn contains(&self, id: &EmitterId) -> bool {
        self.emitters.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.emitters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emitters.is_empty()
    }

    pub fn emit(
        &self,
        skill: &ValidatedSkillIR,
        target: &EmitterId,
    ) -> Result<EmittedArtifact, EmitError> {
        let emitter = self
            .emitters
            .get(target)
            .ok_or_else(|| EmitError::UnknownTarget(target.clone()))?;
        if skill.diagnostics.iter().any(|d| d.is_fatal()) {
            return Err(EmitError::NotValidated {
                target: target.clone(),
                skill: skill.ir.name.clone(),
            });
        }
        let rendered = emitter
            .render(&skill.ir)
            .map_err(|source| EmitError::Render {
                target: target.clone(),
                source,
            })?;
        let mut seen = HashSet::new();
        let mut assets = Vec::with_capacity(rendered.asset_files.len());
        for (path, content) in rendered.asset_files {
            let problem = asset_path_problem(&path)
                .or_else(|| (!seen.insert(path.clone())).then_some("duplicate path"));
            if let Some(reason) = problem {
                return Err(EmitError::InvalidAsset {
                    target: target.clone(),
                    path,
                    reason,
                });
            }
            assets.push((path, with_trailing_newline(content)));
        }
        Ok(EmittedArtifact {
            target: target.clone(),
            main_document: with_trailing_newline(rendered.main_document),
            asset_files: assets,
            manifest_entry: ManifestEntry::from_ir(&skill.ir),
        })
    }

    /// Emits to every registered target. A failing target does not stop
    /// the others.
    pub fn emit_all(
        &self,
        skill: &ValidatedSkillIR,
    ) -> BTreeMap<EmitterId, Result<EmittedArtifact, EmitError>> {
        self.emitters
            .keys()
            .map(|id| (id.clone(), self.emit(skill, id)))
            .collect()
    }
}
