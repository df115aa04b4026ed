//! Generators and independent oracles shared by the property tests.
#![allow(dead_code)]

use proptest::collection::vec;
use proptest::prelude::*;
use serde_json::Value;
use skillc_core::ir::{
    detect_yaml_optimization, AntiSkillConstraint, CodeSnippet, ConstraintLevel, ConstraintScope,
    Example, ExecutionMode, Permission, PermissionKind, Procedure, SchemaKind, SchemaNode,
    SecurityLevel, SkillIR,
};

/// Printable text without line breaks, heavy on characters that need
/// escaping in XML, Markdown or YAML.
pub fn inline_text() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => "[a-zA-Z0-9 ,.;:!?()<>&\"'`*#_/\\\\\\[\\]{}|-]{1,40}",
        1 => "\\PC{1,24}",
    ]
    .prop_filter("non-blank", |s| !s.trim().is_empty())
}

pub fn multiline_text() -> impl Strategy<Value = String> {
    vec(inline_text(), 1..4).prop_map(|lines| lines.join("\n"))
}

pub fn kebab() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9-]{0,15}"
}

pub fn schema_kind_scalar() -> impl Strategy<Value = SchemaKind> {
    prop_oneof![
        Just(SchemaKind::String),
        Just(SchemaKind::Number),
        Just(SchemaKind::Integer),
        Just(SchemaKind::Boolean),
        Just(SchemaKind::Null),
        Just(SchemaKind::Object),
        Just(SchemaKind::Array),
    ]
}

fn decorate(node: SchemaNode, desc: Option<String>, enums: Option<Vec<String>>) -> SchemaNode {
    SchemaNode {
        description: desc,
        enum_values: if node.kind == SchemaKind::String {
            enums
        } else {
            None
        },
        ..node
    }
}

/// Well-shaped schema trees of bounded depth.
pub fn schema() -> impl Strategy<Value = SchemaNode> {
    let leaf = (
        schema_kind_scalar(),
        proptest::option::of(inline_text()),
        proptest::option::of(vec(inline_text(), 1..4)),
    )
        .prop_map(|(k, d, e)| decorate(SchemaNode::scalar(k), d, e));
    leaf.prop_recursive(6, 48, 5, |inner| {
        prop_oneof![
            (
                vec(("[a-zA-Z_][a-zA-Z0-9_ .-]{0,10}", inner.clone()), 0..5),
                proptest::option::of(inline_text())
            )
                .prop_map(|(props, d)| decorate(SchemaNode::object(props), d, None)),
            (inner, proptest::option::of(inline_text())).prop_map(|(items, d)| decorate(
                SchemaNode::array(items),
                d,
                None
            )),
        ]
    })
}

/// Independent depth oracle over the JSON form: explicit stack, no recursion.
pub fn oracle_depth(v: &Value) -> usize {
    let mut best = 0;
    let mut stack = vec![(v, 1usize)];
    while let Some((node, d)) = stack.pop() {
        best = best.max(d);
        if let Some(props) = node.get("properties").and_then(Value::as_object) {
            stack.extend(props.values().map(|c| (c, d + 1)));
        }
        if let Some(items) = node.get("items") {
            stack.push((items, d + 1));
        }
    }
    best
}

fn permission() -> impl Strategy<Value = Permission> {
    (
        prop_oneof![
            Just(PermissionKind::Network),
            Just(PermissionKind::Filesystem),
            Just(PermissionKind::Process),
            Just(PermissionKind::Database),
        ],
        inline_text(),
        any::<bool>(),
    )
        .prop_map(|(kind, scope, read_only)| Permission {
            kind,
            scope,
            read_only,
        })
}

fn constraint() -> impl Strategy<Value = AntiSkillConstraint> {
    (
        prop_oneof![
            Just("anti-skill-injector".to_owned()),
            Just("author".to_owned()),
            kebab()
        ],
        inline_text(),
        prop_oneof![
            Just(ConstraintLevel::Info),
            Just(ConstraintLevel::Warning),
            Just(ConstraintLevel::Error)
        ],
        prop_oneof![
            Just(ConstraintScope::Global),
            (1u32..9).prop_map(ConstraintScope::Step)
        ],
    )
        .prop_map(|(source, content, level, scope)| AntiSkillConstraint {
            source,
            content,
            level,
            scope,
        })
}

fn snippet() -> impl Strategy<Value = CodeSnippet> {
    (
        prop_oneof![
            Just(""),
            Just("python"),
            Just("yaml"),
            Just("YML"),
            Just("sql"),
            Just("bash")
        ],
        prop_oneof![
            multiline_text(),
            Just("```yaml\na: 1\n```".to_owned()),
            Just("key: value\nlist: [1, 2]".to_owned()),
        ],
    )
        .prop_map(|(language, content)| CodeSnippet {
            language: language.to_owned(),
            content,
        })
}

fn level() -> impl Strategy<Value = SecurityLevel> {
    prop_oneof![
        Just(SecurityLevel::Low),
        Just(SecurityLevel::Medium),
        Just(SecurityLevel::High),
        Just(SecurityLevel::Critical),
    ]
}

/// Arbitrary IRs that satisfy the SkillIR invariants.
pub fn skill_ir() -> impl Strategy<Value = SkillIR> {
    let identity = (
        kebab(),
        "[0-9]{1,2}\\.[0-9]{1,2}\\.[0-9]{1,2}",
        inline_text(),
        vec(kebab(), 0..3),
    );
    let body = (
        proptest::option::of(schema()),
        vec(permission(), 0..4),
        vec((inline_text(), any::<bool>()), 0..6),
        vec(constraint(), 0..5),
        vec((multiline_text(), multiline_text()), 0..3),
        vec(snippet(), 0..3),
    );
    let meta = (
        level(),
        any::<bool>(),
        proptest::option::of(level()),
        "[0-9a-f]{64}",
    );
    (identity, body, meta).prop_map(
        |(
            (name, version, description, mcp),
            (schema, permissions, steps, constraints, examples, code),
            (lvl, parallel, declared, hash),
        )| {
            let mut ir = SkillIR::minimal(&name, &version, &description);
            ir.mcp_servers = mcp;
            ir.requires_yaml_optimization = detect_yaml_optimization(schema.as_ref());
            ir.input_schema = schema;
            ir.permissions = permissions;
            ir.procedures = steps
                .into_iter()
                .enumerate()
                .map(|(i, (instruction, is_critical))| Procedure {
                    order: i as u32 + 1,
                    instruction,
                    is_critical,
                })
                .collect();
            for c in constraints {
                ir.add_constraint(c);
            }
            ir.examples = examples
                .into_iter()
                .map(|(input, output)| Example { input, output })
                .collect();
            ir.code_blocks = code;
            ir.security_level = lvl;
            ir.hitl_required = lvl.requires_hitl();
            ir.mode = if parallel {
                ExecutionMode::Parallel
            } else {
                ExecutionMode::Sequential
            };
            ir.declared_security_level = declared;
            ir.source_hash = hash;
            ir
        },
    )
}

/// Info strings of the fenced blocks opened in a Markdown document,
/// following CommonMark's fence rules.
pub fn fence_infos(doc: &str) -> Vec<String> {
    let mut infos = Vec::new();
    let mut open: Option<(char, usize)> = None;
    for line in doc.lines() {
        let indent = line.len() - line.trim_start_matches(' ').len();
        let t = &line[indent..];
        let fence_char = t.chars().next().filter(|c| *c == '`' || *c == '~');
        let run = fence_char.map_or(0, |c| t.len() - t.trim_start_matches(c).len());
        match open {
            None if indent <= 3 && run >= 3 => {
                let c = fence_char.unwrap();
                let info = t[run..].trim();
                if c == '`' && info.contains('`') {
                    continue;
                }
                infos.push(info.to_owned());
                open = Some((c, run));
            }
            Some((c, n))
                if indent <= 3
                    && fence_char == Some(c)
                    && run >= n
                    && t[run..].trim().is_empty() =>
            {
                open = None;
            }
            _ => {}
        }
    }
    infos
}

pub fn has_yaml_fence(doc: &str) -> bool {
    fence_infos(doc).iter().any(|info| {
        let word = info.split_whitespace().next().unwrap_or("");
        word.eq_ignore_ascii_case("yaml") || word.eq_ignore_ascii_case("yml")
    })
}

/// Body of the first fenced block with the given info word.
pub fn fenced_body<'a>(doc: &'a str, tag: &str) -> Option<&'a str> {
    let start = doc.find(&format!("```{tag}\n"))? + 4 + tag.len();
    let end = doc[start..].find("\n```")?;
    Some(&doc[start..start + end + 1])
}

/// Text of every XML text node, or `None` when the document is malformed.
pub fn xml_texts(doc: &str) -> Option<Vec<String>> {
    let parsed = roxmltree::Document::parse(doc).ok()?;
    Some(
        parsed
            .descendants()
            .filter(|n| n.is_text())
            .map(|n| n.text().unwrap_or("").to_owned())
            .collect(),
    )
}

/// The simplified IR listing as published, including its elided constraint text.
pub const PUBLISHED_LISTING: &str = r#"{
  "name": "github-api-client",
  "version": "1.0.0",
  "description": "Interact with GitHub REST API",
  "mcp_servers": ["github-mcp"],
  "input_schema": {
    "type": "object",
    "properties": {
      "repo": { "type": "string" },
      "action": { "type": "string",
        "enum": ["create_issue", "list_prs"] }
    }
  },
  "security_level": "high",
  "hitl_required": true,
  "permissions": [
    { "kind": "network",
      "scope": "https://api.github.com/*",
      "read_only": false }
  ],
  "procedures": [
    { "order": 1,
      "instruction": "Validate GitHub token from env",
      "is_critical": true },
    { "order": 2,
      "instruction": "Construct REST request" },
    { "order": 3,
      "instruction": "Execute HTTP POST to GitHub API" }
  ],
  "anti_skill_constraints": [
    {
      "source": "anti-skill-injector",
      "content": "Never execute HTTP without timeout...",
      "level": "warning",
      "scope": "global"
    }
  ],
  "requires_yaml_optimization": false,
  "mode": "sequential"
}"#;

/// Compares our IR with the listing. The listing elides constraint text with
/// a trailing `...` and omits `source_hash`; everything else must be equal,
/// in the same key order.
pub fn listing_mismatches(ours: &Value, listing: &Value) -> Vec<String> {
    fn walk(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                let xk: Vec<_> = x
                    .keys()
                    .filter(|k| !(path.is_empty() && *k == "source_hash"))
                    .collect();
                let yk: Vec<_> = y.keys().collect();
                if xk != yk {
                    out.push(format!("{path}: keys {xk:?} != {yk:?}"));
                    return;
                }
                for k in yk {
                    walk(&format!("{path}/{k}"), &x[k], &y[k], out);
                }
            }
            (Value::Array(x), Value::Array(y)) => {
                if x.len() != y.len() {
                    out.push(format!("{path}: length {} != {}", x.len(), y.len()));
                    return;
                }
                for (i, (p, q)) in x.iter().zip(y).enumerate() {
                    walk(&format!("{path}/{i}"), p, q, out);
                }
            }
            (Value::String(x), Value::String(y)) => {
                let ok = match y.strip_suffix("...") {
                    Some(prefix) => x.starts_with(prefix),
                    None => x == y,
                };
                if !ok {
                    out.push(format!("{path}: {x:?} != {y:?}"));
                }
            }
            _ if a != b => out.push(format!("{path}: {a} != {b}")),
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk("", ours, listing, &mut out);
    out
}
