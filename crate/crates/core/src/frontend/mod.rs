//! Phase 1: split a SKILL.md source into typed frontmatter and classified
//! Markdown body blocks.

mod frontmatter;
mod markdown;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagnostics::{Diagnostic, DiagnosticCode, InterceptionCategory, Span};

pub use frontmatter::{parse_frontmatter, Frontmatter, ParsedFrontmatter, PermissionDecl};
pub(crate) use markdown::SectionRoles;
pub use markdown::{lower_markdown, BlockKind, BodyBlock};

/// Marker that flags a procedure step as critical, both in authored
/// sources and in Markdown-flavoured output.
pub const CRITICAL_MARKER: &str = "**[CRITICAL]**";

/// A skill source: path identity, UTF-8 content and its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    path: String,
    content: String,
    source_hash: String,
}

impl SourceFile {
    /// Decodes raw bytes. A leading UTF-8 byte-order mark is dropped before
    /// hashing so BOM and non-BOM copies of a file hash identically.
    pub fn from_bytes(path: impl Into<String>, bytes: Vec<u8>) -> Result<Self, FrontmatterError> {
        let path = path.into();
        let mut content = String::from_utf8(bytes).map_err(|e| {
            let at = e.utf8_error().valid_up_to();
            FrontmatterError::new(
                Diagnostic::fatal(
                    DiagnosticCode::FmEncoding,
                    format!("source is not valid UTF-8 (invalid byte at offset {at})"),
                )
                .with_hint("save the file as UTF-8"),
            )
        })?;
        if content.starts_with('\u{feff}') {
            content.drain(..'\u{feff}'.len_utf8());
        }
        Ok(Self::from_string(path, content))
    }

    pub fn from_text(path: impl Into<String>, text: &str) -> Self {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        Self::from_string(path.into(), text.to_owned())
    }

    fn from_string(path: String, content: String) -> Self {
        let source_hash = sha256_hex(content.as_bytes());
        SourceFile {
            path,
            content,
            source_hash,
        }
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn content(&self) -> &str {
        &self.content
    }

    pub fn source_hash(&self) -> &str {
        &self.source_hash
    }

    /// Recomputes the digest and compares it with the stored one.
    pub fn verify_hash(&self) -> bool {
        sha256_hex(self.content.as_bytes()) == self.source_hash
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The frontend rejected a source: bad encoding, missing delimiters,
/// unparseable YAML, or a required key that is absent or mistyped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .diagnostic.message)]
pub struct FrontmatterError {
    pub diagnostic: Diagnostic,
    /// Warnings gathered before the failure (e.g. duplicate keys).
    pub warnings: Vec<Diagnostic>,
}

impl FrontmatterError {
    pub(crate) fn new(diagnostic: Diagnostic) -> Self {
        FrontmatterError {
            diagnostic,
            warnings: Vec::new(),
        }
    }

    pub fn category(&self) -> InterceptionCategory {
        InterceptionCategory::YamlViolation
    }
}

/// Output of phase 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawAst {
    pub frontmatter: Frontmatter,
    pub blocks: Vec<BodyBlock>,
    pub source_hash: String,
    /// Non-fatal frontend findings, such as duplicate frontmatter keys.
    pub warnings: Vec<Diagnostic>,
    /// Span of the YAML between the delimiters.
    pub frontmatter_span: Span,
}

/// Parses a whole source. Pure: identical bytes give identical trees.
pub fn parse_skill(source: &SourceFile) -> Result<RawAst, FrontmatterError> {
    let parsed = parse_frontmatter(source)?;
    let blocks = markdown::lower_body(source.content(), parsed.body_offset);
    Ok(RawAst {
        frontmatter: parsed.frontmatter,
        blocks,
        source_hash: source.source_hash().to_owned(),
        warnings: parsed.warnings,
        frontmatter_span: parsed.yaml_span,
    })
}
