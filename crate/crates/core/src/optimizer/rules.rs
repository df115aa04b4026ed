//! Anti-skill injection rules and the keyword matcher behind them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{AntiSkillConstraint, ConstraintLevel, ConstraintScope, SkillIR};

/// `source` recorded on every constraint the injector adds.
pub const INJECTOR_SOURCE: &str = "anti-skill-injector";

pub const HTTP_SAFETY: &str = "http-safety";
pub const PARSE_SAFETY: &str = "parse-safety";
pub const DB_SAFETY: &str = "db-safety";
pub const LOOP_SAFETY: &str = "loop-safety";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleLevel {
    Warning,
    Error,
}

impl From<RuleLevel> for ConstraintLevel {
    fn from(level: RuleLevel) -> Self {
        match level {
            RuleLevel::Warning => ConstraintLevel::Warning,
            RuleLevel::Error => ConstraintLevel::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectionRule {
    pub id: String,
    #[serde(alias = "keywords")]
    pub trigger_keywords: Vec<String>,
    #[serde(alias = "constraint")]
    pub constraint_text: String,
    pub level: RuleLevel,
}

impl InjectionRule {
    pub fn new(id: &str, keywords: &[&str], constraint: &str, level: RuleLevel) -> Self {
        InjectionRule {
            id: id.to_owned(),
            trigger_keywords: keywords.iter().map(|k| (*k).to_owned()).collect(),
            constraint_text: constraint.to_owned(),
            level,
        }
    }

    /// Whether any keyword occurs in `text` (see [`tokenize`] for the rules).
    pub fn matches(&self, text: &str) -> bool {
        let tokens = tokenize(text);
        self.matches_tokens(&tokens)
    }

    fn matches_tokens(&self, tokens: &[String]) -> bool {
        self.trigger_keywords.iter().any(|kw| {
            let phrase = tokenize(kw);
            !phrase.is_empty() && tokens.windows(phrase.len()).any(|w| w == phrase.as_slice())
        })
    }
}

/// Splits text into lowercase alphanumeric runs. Single-word keywords match
/// whole tokens, so `GET` does not fire on `target`; multi-word keywords
/// match contiguous token sequences.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleSetError {
    #[error("duplicate rule id `{0}`")]
    DuplicateId(String),
    #[error("rule `{0}` has no trigger keywords")]
    NoKeywords(String),
    #[error("rule `{0}` has an empty keyword")]
    EmptyKeyword(String),
    #[error("rule `{0}` has an empty constraint text")]
    EmptyConstraint(String),
    #[error("rule id must be nonempty")]
    EmptyId,
}

/// An ordered, validated set of injection rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSet {
    rules: Vec<InjectionRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<InjectionRule>) -> Result<Self, RuleSetError> {
        let mut seen = BTreeSet::new();
        for rule in &rules {
            if rule.id.trim().is_empty() {
                return Err(RuleSetError::EmptyId);
            }
            if !seen.insert(rule.id.as_str()) {
                return Err(RuleSetError::DuplicateId(rule.id.clone()));
            }
            if rule.trigger_keywords.is_empty() {
                return Err(RuleSetError::NoKeywords(rule.id.clone()));
            }
            if rule.trigger_keywords.iter().any(|k| tokenize(k).is_empty()) {
                return Err(RuleSetError::EmptyKeyword(rule.id.clone()));
            }
            if rule.constraint_text.trim().is_empty() {
                return Err(RuleSetError::EmptyConstraint(rule.id.clone()));
            }
        }
        Ok(RuleSet { rules })
    }

    /// The four built-in rules: HTTP, HTML parsing, destructive database
    /// operations and loops.
    pub fn builtin() -> Self {
        RuleSet {
            rules: vec![
                InjectionRule::new(
                    HTTP_SAFETY,
                    &["HTTP", "GET", "POST", "fetch", "request"],
                    "Never execute HTTP without timeout (10s). Max 3 retries on 403.",
                    RuleLevel::Warning,
                ),
                InjectionRule::new(
                    PARSE_SAFETY,
                    &["BeautifulSoup", "HTML parse", "scrape"],
                    "Do not parse raw JS variables with HTML parsers. Fallback to Regex.",
                    RuleLevel::Warning,
                ),
                InjectionRule::new(
                    DB_SAFETY,
                    &["DROP", "DELETE", "TRUNCATE"],
                    "No destructive DB ops without user confirmation. Show affected rows.",
                    RuleLevel::Error,
                ),
                InjectionRule::new(
                    LOOP_SAFETY,
                    &["while", "loop", "repeat"],
                    "All loops must have max iteration limit (1000).",
                    RuleLevel::Warning,
                ),
            ],
        }
    }

    /// Adds `extra` rules after these; a rule whose id already exists
    /// replaces the existing one in place.
    pub fn extended(mut self, extra: Vec<InjectionRule>) -> Result<Self, RuleSetError> {
        for rule in extra {
            match self.rules.iter_mut().find(|r| r.id == rule.id) {
                Some(slot) => *slot = rule,
                None => self.rules.push(rule),
            }
        }
        RuleSet::new(self.rules)
    }

    pub fn rules(&self) -> &[InjectionRule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&InjectionRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::builtin()
    }
}

/// Texts the injector scans: procedure instructions and code block bodies.
pub fn scan_surface(ir: &SkillIR) -> impl Iterator<Item = &str> {
    ir.procedures
        .iter()
        .map(|p| p.instruction.as_str())
        .chain(ir.code_blocks.iter().map(|c| c.content.as_str()))
}

/// Appends one global constraint per triggered rule, skipping constraints
/// already present. Returns the new IR and the ids of triggered rules.
pub fn inject_anti_skill(ir: &SkillIR, rules: &RuleSet) -> (SkillIR, BTreeSet<String>) {
    let token_lists: Vec<Vec<String>> = scan_surface(ir).map(tokenize).collect();
    let mut out = ir.clone();
    let mut triggered = BTreeSet::new();
    for rule in rules.rules() {
        if token_lists.iter().any(|tokens| rule.matches_tokens(tokens)) {
            triggered.insert(rule.id.clone());
            out.add_constraint(AntiSkillConstraint {
                source: INJECTOR_SOURCE.to_owned(),
                content: rule.constraint_text.clone(),
                level: rule.level.into(),
                scope: ConstraintScope::Global,
            });
        }
    }
    (out, triggered)
}
