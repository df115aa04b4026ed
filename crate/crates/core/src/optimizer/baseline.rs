use std::collections::BTreeSet;

use globset::{Glob, GlobBuilder, GlobMatcher};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// What the permission auditor compares declared permissions against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecurityBaseline {
    pub trusted_mcp_servers: BTreeSet<String>,
    /// Globs a filesystem write scope must fall under.
    pub allowed_write_roots: Vec<String>,
    /// Network scopes at least this broad are flagged.
    pub forbidden_network_scopes: Vec<String>,
    pub max_permissions: usize,
}

impl Default for SecurityBaseline {
    fn default() -> Self {
        SecurityBaseline {
            trusted_mcp_servers: BTreeSet::new(),
            allowed_write_roots: vec!["./**".to_owned()],
            forbidden_network_scopes: vec!["*".to_owned(), "http://*".to_owned()],
            max_permissions: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("allowed_write_roots contains an empty entry")]
    EmptyWriteRoot,
    #[error("invalid glob `{glob}`: {reason}")]
    InvalidGlob { glob: String, reason: String },
}

impl SecurityBaseline {
    pub fn trusting<I, S>(servers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SecurityBaseline {
            trusted_mcp_servers: servers.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.allowed_write_roots.iter().any(|r| r.trim().is_empty()) {
            return Err(BaselineError::EmptyWriteRoot);
        }
        self.allowed_write_roots
            .iter()
            .try_for_each(|g| pattern_matcher(g).map(|_| ()))
    }

    /// Compiles the write roots, skipping entries that fail to parse;
    /// [`SecurityBaseline::validate`] reports those up front.
    pub(crate) fn compile(&self) -> CompiledBaseline {
        CompiledBaseline {
            write_roots: self
                .allowed_write_roots
                .iter()
                .filter(|g| !g.trim().is_empty())
                .filter_map(|g| pattern_matcher(g).ok())
                .collect(),
            forbidden_network: self.forbidden_network_scopes.clone(),
        }
    }
}

fn pattern_matcher(glob: &str) -> Result<GlobMatcher, BaselineError> {
    GlobBuilder::new(glob)
        .literal_separator(true)
        .build()
        .map(|g| g.compile_matcher())
        .map_err(|e| BaselineError::InvalidGlob {
            glob: glob.to_owned(),
            reason: e.kind().to_string(),
        })
}

pub(crate) struct CompiledBaseline {
    write_roots: Vec<GlobMatcher>,
    forbidden_network: Vec<String>,
}

impl CompiledBaseline {
    /// The forbidden pattern a network scope is at least as broad as, if any.
    ///
    /// A scope covers a forbidden pattern when the scope, read as a glob,
    /// matches the pattern's literal text (`*` covers `http://*`).
    pub(crate) fn broad_network_match(&self, scope: &str) -> Option<&str> {
        let as_glob = Glob::new(scope).ok().map(|g| g.compile_matcher());
        self.forbidden_network
            .iter()
            .find(|pattern| match &as_glob {
                Some(m) => m.is_match(pattern.as_str()),
                None => scope == pattern.as_str(),
            })
            .map(String::as_str)
    }

    /// Whether a write scope lies under one of the allowed roots.
    ///
    /// Relative scopes are read against `./`; scopes with `..` segments never
    /// qualify.
    pub(crate) fn write_scope_allowed(&self, scope: &str) -> bool {
        let normalized = normalize_path_scope(scope);
        if normalized.split('/').any(|seg| seg == "..") {
            return false;
        }
        self.write_roots
            .iter()
            .any(|root| root.is_match(&normalized))
    }
}

fn normalize_path_scope(scope: &str) -> String {
    let s = scope.trim();
    if s.starts_with('/') || s.starts_with('.') || s.starts_with('~') {
        s.to_owned()
    } else {
        format!("./{s}")
    }
}

/// Filesystem write scopes that grant the entire filesystem.
pub(crate) fn is_root_write_scope(scope: &str) -> bool {
    matches!(scope.trim(), "/" | "/**")
}
