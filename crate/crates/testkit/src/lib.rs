//! Seeded SKILL.md corpora and reference oracles for the test suites.
//!
//! Nothing here links against the compiler: skills are described with
//! [`SkillSpec`] and rendered to plain text, and the oracles work on strings.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod oracle;

pub use oracle::{oracle_triggered, RULE_KEYWORDS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermissionSpec {
    pub kind: String,
    pub scope: String,
    pub read_only: bool,
}

impl PermissionSpec {
    pub fn new(kind: &str, scope: &str, read_only: bool) -> Self {
        PermissionSpec {
            kind: kind.to_owned(),
            scope: scope.to_owned(),
            read_only,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillSpec {
    pub name: String,
    pub version: Option<String>,
    pub description: String,
    pub mcp_servers: Vec<String>,
    pub permissions: Vec<PermissionSpec>,
    pub prose: Vec<String>,
    pub schema_json: Option<String>,
    pub procedures: Vec<(String, bool)>,
    pub code: Vec<(String, String)>,
    pub examples: Vec<(String, String)>,
    /// Replaces the generated frontmatter block verbatim, delimiters included.
    pub raw_frontmatter: Option<String>,
}

impl SkillSpec {
    pub fn new(name: &str, description: &str) -> Self {
        SkillSpec {
            name: name.to_owned(),
            version: Some("1.0.0".to_owned()),
            description: description.to_owned(),
            mcp_servers: Vec::new(),
            permissions: Vec::new(),
            prose: Vec::new(),
            schema_json: None,
            procedures: Vec::new(),
            code: Vec::new(),
            examples: Vec::new(),
            raw_frontmatter: None,
        }
    }

    /// Texts the injector is expected to scan.
    pub fn scanned_texts(&self) -> Vec<&str> {
        self.procedures
            .iter()
            .map(|(t, _)| t.as_str())
            .chain(self.code.iter().map(|(_, c)| c.as_str()))
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.raw_frontmatter {
            Some(raw) => out.push_str(raw),
            None => {
                out.push_str("---\n");
                let _ = writeln!(out, "name: {}", self.name);
                if let Some(v) = &self.version {
                    let _ = writeln!(out, "version: {v}");
                }
                let _ = writeln!(out, "description: {}", quote(&self.description));
                if !self.mcp_servers.is_empty() {
                    let _ = writeln!(out, "mcp_servers: [{}]", self.mcp_servers.join(", "));
                }
                if !self.permissions.is_empty() {
                    out.push_str("permissions:\n");
                    for p in &self.permissions {
                        let _ = writeln!(
                            out,
                            "  - kind: {}\n    scope: {}\n    read_only: {}",
                            p.kind,
                            quote(&p.scope),
                            p.read_only
                        );
                    }
                }
                out.push_str("---\n");
            }
        }
        let _ = writeln!(out, "\n# {}", self.name);
        for p in &self.prose {
            let _ = writeln!(out, "\n{p}");
        }
        if let Some(schema) = &self.schema_json {
            let _ = writeln!(out, "\n## Input Schema\n\n```json\n{schema}\n```");
        }
        if !self.procedures.is_empty() {
            out.push_str("\n## Procedures\n\n");
            for (i, (text, critical)) in self.procedures.iter().enumerate() {
                let marker = if *critical { " **[CRITICAL]**" } else { "" };
                let _ = writeln!(out, "{}. {text}{marker}", i + 1);
            }
        }
        if !self.code.is_empty() {
            out.push_str("\n## Reference Code\n");
            for (lang, content) in &self.code {
                let _ = writeln!(out, "\n```{lang}\n{content}\n```");
            }
        }
        if !self.examples.is_empty() {
            out.push_str("\n## Examples\n");
            for (input, output) in &self.examples {
                let _ = writeln!(out, "\n**Input:** {input}\n\n**Output:** {output}");
            }
        }
        out
    }

    /// Writes `<root>/<name>/SKILL.md`.
    pub fn write_to(&self, root: &Path) -> std::io::Result<()> {
        let dir = root.join(&self.name);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("SKILL.md"), self.render())
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

pub fn write_corpus(root: &Path, skills: &[SkillSpec]) -> std::io::Result<()> {
    skills.iter().try_for_each(|s| s.write_to(root))
}

/// Words that never contain a trigger token.
const FILLER: &[&str] = &[
    "validate",
    "input",
    "compute",
    "summary",
    "write",
    "report",
    "normalize",
    "records",
    "config",
    "check",
    "the",
    "output",
    "format",
    "table",
    "user",
    "data",
    "file",
    "read",
    "transform",
    "merge",
    "rows",
    "values",
    "schema",
    "column",
    "cache",
    "result",
    "token",
    "page",
    "field",
];

/// Words that contain a keyword as a substring but not as a token.
const DISTRACTORS: &[&str] = &[
    "target",
    "forget",
    "gets",
    "requests",
    "requested",
    "fetcher",
    "https",
    "loops",
    "looping",
    "dropdown",
    "deleted",
    "truncated",
    "repeated",
    "meanwhile",
    "whileloop",
    "postgres",
    "scraper",
    "beautifulsoups",
    "html5",
    "parser",
    "posted",
    "getter",
    "droplet",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words)
        .map(|_| {
            if rng.gen_bool(0.15) {
                *DISTRACTORS.choose(rng).unwrap()
            } else {
                *FILLER.choose(rng).unwrap()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn random_case(rng: &mut ChaCha8Rng, word: &str) -> String {
    match rng.gen_range(0..3) {
        0 => word.to_lowercase(),
        1 => word.to_uppercase(),
        _ => word.to_owned(),
    }
}

/// Punctuation that may surround a seeded keyword without fusing with it.
fn wrap(rng: &mut ChaCha8Rng, word: &str) -> String {
    let (l, r) = *[
        ("", ""),
        ("(", ")"),
        ("`", "`"),
        ("", ","),
        ("\"", "\""),
        ("", "."),
    ]
    .choose(rng)
    .unwrap();
    format!("{l}{word}{r}")
}

fn body_with(rng: &mut ChaCha8Rng, spec: &mut SkillSpec, seeded: &[&str]) {
    let steps = rng.gen_range(1..6);
    spec.procedures = (0..steps)
        .map(|_| {
            let n = rng.gen_range(3..9);
            (sentence(rng, n), rng.gen_bool(0.2))
        })
        .collect();
    if rng.gen_bool(0.4) {
        let n = rng.gen_range(2..6);
        spec.code.push((
            "python".to_owned(),
            format!("x = {}\nprint(x)", sentence(rng, n).replace(' ', "_")),
        ));
    }
    for kw in seeded {
        let cased = random_case(rng, kw);
        let word = wrap(rng, &cased);
        let in_code = !spec.code.is_empty() && rng.gen_bool(0.3);
        let target = if in_code {
            &mut spec.code[0].1
        } else {
            let i = rng.gen_range(0..spec.procedures.len());
            &mut spec.procedures[i].0
        };
        target.push(' ');
        target.push_str(&word);
        target.push_str(" now");
    }
}

fn pick_keyword(rng: &mut ChaCha8Rng, rule: &str) -> &'static str {
    let (_, kws) = RULE_KEYWORDS
        .iter()
        .find(|(id, _)| *id == rule)
        .expect("known rule");
    kws.choose(rng).unwrap()
}

/// Skills whose scanned text contains keywords of exactly the planned rules.
/// Rule keywords also appear in descriptions and prose, which are not scanned.
pub fn keyword_corpus(n: usize, seed: u64) -> Vec<(SkillSpec, BTreeSet<&'static str>)> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| {
            let plan: BTreeSet<&'static str> = RULE_KEYWORDS
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .map(|(id, _)| *id)
                .collect();
            let seeded: Vec<&str> = plan.iter().map(|id| pick_keyword(&mut rng, id)).collect();
            let noise_rule = RULE_KEYWORDS.choose(&mut rng).unwrap().0;
            let noise = pick_keyword(&mut rng, noise_rule);
            let mut spec = SkillSpec::new(
                &format!("kw-skill-{i:04}"),
                &format!("Skill that may {noise} things"),
            );
            spec.prose
                .push(format!("Background: {noise} {}.", sentence(&mut rng, 5)));
            body_with(&mut rng, &mut spec, &seeded);
            (spec, plan)
        })
        .collect()
}

/// Rule ids seeded in each skill of [`distribution_corpus`].
pub fn distribution_plan() -> Vec<BTreeSet<&'static str>> {
    (0..233)
        .map(|i| {
            let mut plan = BTreeSet::new();
            if i < 212 {
                plan.insert("http-safety");
            }
            if (117..221).contains(&i) {
                plan.insert("loop-safety");
            }
            if i < 78 {
                plan.insert("db-safety");
            }
            if i == 50 || i == 215 {
                plan.insert("parse-safety");
            }
            plan
        })
        .collect()
}

/// 233 skills: http 212, loop 104, db 78, parse 2, and 221 with any rule.
pub fn distribution_corpus(seed: u64) -> Vec<(SkillSpec, BTreeSet<&'static str>)> {
    let mut rng = rng(seed);
    let mut plans = distribution_plan();
    plans.shuffle(&mut rng);
    plans
        .into_iter()
        .enumerate()
        .map(|(i, plan)| {
            let seeded: Vec<&str> = plan.iter().map(|id| pick_keyword(&mut rng, id)).collect();
            let mut spec = SkillSpec::new(
                &format!("dist-skill-{i:03}"),
                "Synthetic skill for trigger statistics",
            );
            body_with(&mut rng, &mut spec, &seeded);
            (spec, plan)
        })
        .collect()
}

pub const TRUSTED_SERVERS: &[&str] = &["github-mcp", "postgres-mcp", "search-mcp"];

/// How a skill in [`interception_corpus`] is meant to fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seeded {
    Clean,
    Frontmatter,
    Permission,
    Schema,
}

/// `total` skills of which 5 have malformed frontmatter, 4 request a
/// forbidden permission and 1 carries an invalid schema. All others compile
/// against a baseline trusting [`TRUSTED_SERVERS`].
pub fn interception_corpus(total: usize, seed: u64) -> Vec<(SkillSpec, Seeded)> {
    assert!(total >= 10);
    let mut rng = rng(seed);
    let mut kinds = vec![Seeded::Clean; total - 10];
    kinds.extend([Seeded::Frontmatter; 5]);
    kinds.extend([Seeded::Permission; 4]);
    kinds.push(Seeded::Schema);
    kinds.shuffle(&mut rng);
    let mut frontmatter_variant = 0;
    let mut permission_variant = 0;
    kinds
        .into_iter()
        .enumerate()
        .map(|(i, kind)| {
            let mut spec = realistic_skill(&mut rng, &format!("tax-skill-{i:03}"));
            match kind {
                Seeded::Clean => {}
                Seeded::Frontmatter => {
                    let name = spec.name.clone();
                    spec.raw_frontmatter = Some(match frontmatter_variant {
                        0 => format!("---\nname: {name}\nversion: 1.0.0\ndescription: [unclosed\n---\n"),
                        1 => format!("---\nname: {name}\nversion: 1.0.0\ndescription: never closed\n"),
                        2 => format!("---\nname: {name}\ndescription: no version here\n---\n"),
                        3 => "---\nname: Bad_Name\nversion: 1.0.0\ndescription: d\n---\n".to_owned(),
                        _ => format!("---\nname: {name}\nversion: 1.0.0\ndescription: d\nmcp_servers: [github-mcp, github-mcp]\n---\n"),
                    });
                    frontmatter_variant += 1;
                }
                Seeded::Permission => {
                    let scope = ["/", "/**"][permission_variant % 2];
                    spec.permissions.push(PermissionSpec::new("filesystem", scope, false));
                    permission_variant += 1;
                }
                Seeded::Schema => {
                    spec.schema_json = Some(r#"{"type": "object", "properties": {"id": {"type": "strng"}}}"#.to_owned());
                }
            }
            (spec, kind)
        })
        .collect()
}

fn schema_of_depth(rng: &mut ChaCha8Rng, depth: usize) -> String {
    fn node(rng: &mut ChaCha8Rng, depth: usize) -> String {
        if depth <= 1 {
            let t = *["string", "integer", "boolean", "number"]
                .choose(rng)
                .unwrap();
            return format!(
                r#"{{"type": "{t}", "description": "{}"}}"#,
                sentence(rng, 3)
            );
        }
        let width = rng.gen_range(1..4);
        let mut props: Vec<String> = (0..width)
            .map(|k| format!(r#""f{k}": {}"#, node(rng, 1)))
            .collect();
        props.push(format!(r#""nested": {}"#, node(rng, depth - 1)));
        format!(
            r#"{{"type": "object", "properties": {{{}}}}}"#,
            props.join(", ")
        )
    }
    node(rng, depth)
}

/// A well-formed skill of random size: simple, medium or complex.
pub fn realistic_skill(rng: &mut ChaCha8Rng, name: &str) -> SkillSpec {
    let size = rng.gen_range(0..3);
    let mut spec = SkillSpec::new(name, &format!("Helps {}", sentence(rng, 6)));
    if rng.gen_bool(0.5) {
        spec.mcp_servers
            .push((*TRUSTED_SERVERS.choose(rng).unwrap()).to_owned());
    }
    let perms = [
        PermissionSpec::new("network", "https://api.example.com/*", true),
        PermissionSpec::new("filesystem", "./out/**", false),
        PermissionSpec::new("database", "postgres://db/*", false),
        PermissionSpec::new("process", "python3", true),
    ];
    spec.permissions = perms
        .iter()
        .filter(|_| rng.gen_bool(0.35))
        .cloned()
        .collect();
    let paragraphs = [1, 3, 8][size];
    spec.prose = (0..paragraphs).map(|_| sentence(rng, 25)).collect();
    let depth = rng.gen_range(1..6);
    if rng.gen_bool(0.7) {
        spec.schema_json = Some(schema_of_depth(rng, depth));
    }
    let steps = [3, 6, 12][size];
    let keywords: Vec<&str> = RULE_KEYWORDS
        .iter()
        .flat_map(|(_, k)| k.iter().copied())
        .collect();
    spec.procedures = (0..steps)
        .map(|_| {
            let mut s = sentence(rng, 10);
            if rng.gen_bool(0.4) {
                s.push(' ');
                s.push_str(keywords.choose(rng).unwrap());
            }
            (s, rng.gen_bool(0.15))
        })
        .collect();
    for _ in 0..[0, 1, 3][size] {
        let lines: Vec<String> = (0..8)
            .map(|_| format!("    {}", sentence(rng, 6).replace(' ', "_")))
            .collect();
        spec.code.push((
            "python".to_owned(),
            format!("def run():\n{}", lines.join("\n")),
        ));
    }
    for _ in 0..[0, 1, 2][size] {
        spec.examples.push((sentence(rng, 8), sentence(rng, 12)));
    }
    spec
}

/// `n` valid skills with the size mix of a typical skill collection.
pub fn latency_corpus(n: usize, seed: u64) -> Vec<SkillSpec> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| realistic_skill(&mut rng, &format!("lat-skill-{i:03}")))
        .collect()
}

/// Skills with names up to 40 characters and ASCII descriptions up to 120.
pub fn manifest_corpus(n: usize, seed: u64) -> Vec<SkillSpec> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| {
            let stem_len = rng.gen_range(4..=34);
            let stem: String = (0..stem_len)
                .map(|k| {
                    if k % 7 == 6 {
                        '-'
                    } else {
                        (b'a' + rng.gen_range(0..26)) as char
                    }
                })
                .collect();
            let name = format!("{}-{i:04}", stem.trim_matches('-'));
            let mut desc = String::new();
            let target = rng.gen_range(20..=120);
            while desc.len() < target {
                if !desc.is_empty() {
                    desc.push(' ');
                }
                desc.push_str(FILLER.choose(&mut rng).unwrap());
            }
            desc.truncate(120);
            let mut spec = SkillSpec::new(&name, desc.trim_end());
            body_with(&mut rng, &mut spec, &[]);
            spec
        })
        .collect()
}
