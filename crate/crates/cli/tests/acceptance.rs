//! End-to-end acceptance suite. Every criterion runs even when an earlier
//! one fails; each prints a single PASS or FAIL line with its measurement.
//!
//! Run alone with `cargo test -p skillc --test acceptance -- --nocapture`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;
use skillc_core::emitters::{generate_manifest, EmitterId, EmitterRegistry, RenderedDocument};
use skillc_core::frontend::SourceFile;
use skillc_core::ir::{
    detect_yaml_optimization, max_nesting_depth, serialize_ir, SkillIR, YAML_DEPTH_THRESHOLD,
};
use skillc_core::metrics::{estimate_tokens, measure_compile};
use skillc_core::optimizer::{optimize, scan_surface, RuleSet, SecurityBaseline, ValidatedSkillIR};
use skillc_core::pipeline::Compiler;
use skillc_testkit::{
    distribution_corpus, interception_corpus, keyword_corpus, latency_corpus, manifest_corpus,
    oracle_triggered, write_corpus, Seeded, SkillSpec, TRUSTED_SERVERS,
};
use walkdir::WalkDir;

use common::{listing_mismatches, oracle_depth, xml_texts, PUBLISHED_LISTING};

const GOLDEN_RUNTIME: Duration = Duration::from_secs(1);
const ORACLE_RUNTIME: Duration = Duration::from_secs(10);
const MEAN_LATENCY_MS: f64 = 50.0;
const MAX_LATENCY_MS: f64 = 200.0;
const SCALING_TOLERANCE: f64 = 0.20;
const MANIFEST_ENTRY_TOKENS: usize = 80;

const DISTRIBUTION: [(&str, usize); 4] = [
    ("http-safety", 212),
    ("loop-safety", 104),
    ("db-safety", 78),
    ("parse-safety", 2),
];
const DISTRIBUTION_TOTAL: usize = 233;
const DISTRIBUTION_TRIGGERED: usize = 221;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn skillc(cwd: &Path, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_skillc"));
    for var in [
        "SKILLC_BASELINE",
        "SKILLC_RULES",
        "SKILLC_OUT",
        "SKILLC_TARGETS",
    ] {
        cmd.env_remove(var);
    }
    cmd.current_dir(cwd)
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    WalkDir::new(root)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            (
                e.path().strip_prefix(root).unwrap().to_path_buf(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn trusting() -> SecurityBaseline {
    SecurityBaseline::trusting(TRUSTED_SERVERS.iter().copied())
}

fn trusting_baseline_file(dir: &Path) -> PathBuf {
    let path = dir.join("baseline.toml");
    let servers: Vec<String> = TRUSTED_SERVERS.iter().map(|s| format!("{s:?}")).collect();
    fs::write(
        &path,
        format!("trusted_mcp_servers = [{}]\n", servers.join(", ")),
    )
    .unwrap();
    path
}

fn source(spec: &SkillSpec) -> SourceFile {
    SourceFile::from_text(format!("{}/SKILL.md", spec.name), &spec.render())
}

fn owned(set: &BTreeSet<&str>) -> BTreeSet<String> {
    set.iter().map(|s| (*s).to_owned()).collect()
}

fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    (0..n)
        .map(|_| {
            strategy
                .new_tree(&mut runner)
                .expect("strategy generates")
                .current()
        })
        .collect()
}

fn json_ir() -> EmitterId {
    EmitterId::new("json-ir").unwrap()
}

fn five_targets() -> EmitterRegistry {
    let mut registry = EmitterRegistry::with_builtins();
    registry
        .register(json_ir(), |ir: &SkillIR| {
            Ok(RenderedDocument::new(serialize_ir(ir)))
        })
        .unwrap();
    registry
}

fn golden_emission() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("dist");
    let baseline = fixtures().join("baseline.toml");
    let skills = fixtures().join("skills");
    let start = Instant::now();
    let o = skillc(
        tmp.path(),
        &[
            "build",
            path_str(&skills),
            "--baseline",
            path_str(&baseline),
            "--out",
            path_str(&out),
            "--no-timestamps",
        ],
    );
    let elapsed = start.elapsed();
    ensure!(
        o.status.code() == Some(0),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );

    let golden: BTreeMap<PathBuf, Vec<u8>> = tree(&fixtures().join("golden"))
        .into_iter()
        .filter(|(p, _)| !p.starts_with("ir"))
        .collect();
    let produced: BTreeMap<PathBuf, Vec<u8>> = tree(&out)
        .into_iter()
        .filter(|(p, _)| !p.ends_with("manifest.json") && !p.ends_with("build-info.json"))
        .collect();
    let golden_paths: Vec<_> = golden.keys().collect();
    let produced_paths: Vec<_> = produced.keys().collect();
    ensure!(
        golden_paths == produced_paths,
        "file sets differ: {golden_paths:?} vs {produced_paths:?}"
    );
    for (path, bytes) in &golden {
        ensure!(
            produced[path] == *bytes,
            "{} differs from golden",
            path.display()
        );
    }

    let doc = |target: &str| {
        String::from_utf8(
            produced[&PathBuf::from(format!("{target}/data-migration/SKILL.md"))].clone(),
        )
        .unwrap()
    };
    let claude = doc("claude");
    ensure!(
        claude.contains("<step order=\"1\" critical=\"true\">"),
        "claude lacks critical step"
    );
    ensure!(
        claude.contains("<anti_pattern source=\"anti-skill-injector\">"),
        "claude lacks anti_pattern"
    );
    let gemini = doc("gemini");
    let yaml_section = gemini
        .split("Parameter Schema (YAML Optimized)")
        .nth(1)
        .unwrap_or("");
    ensure!(
        yaml_section.trim_start().starts_with("```yaml"),
        "gemini lacks yaml fence under the schema heading"
    );
    ensure!(
        doc("kimi").contains("`migration_config.source_db.host`"),
        "kimi lacks flattened path"
    );
    let codex = doc("codex");
    let constraints = codex.split("<constraints>").nth(1).unwrap_or("");
    ensure!(
        constraints.contains("<forbidden>") && constraints.contains("</constraints>"),
        "codex lacks constraints/forbidden"
    );
    ensure!(elapsed < GOLDEN_RUNTIME, "took {elapsed:?}");
    Ok(format!("{} files byte-exact, {elapsed:.0?}", golden.len()))
}

fn ir_fidelity() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let baseline = fixtures().join("baseline.toml");
    let skill = fixtures().join("skills/github-api-client");
    let o = skillc(
        tmp.path(),
        &[
            "check",
            path_str(&skill),
            "--baseline",
            path_str(&baseline),
            "--out",
            "out",
            "--emit-ir",
        ],
    );
    ensure!(o.status.code() == Some(0), "exit {:?}", o.status.code());
    let text = fs::read_to_string(tmp.path().join("out/ir/github-api-client.skir.json")).unwrap();
    let ours: Value = serde_json::from_str(&text).unwrap();
    let listing: Value = serde_json::from_str(PUBLISHED_LISTING).unwrap();
    let diffs = listing_mismatches(&ours, &listing);
    ensure!(diffs.is_empty(), "{diffs:?}");
    ensure!(
        ours["security_level"] == "high",
        "security_level {}",
        ours["security_level"]
    );
    ensure!(
        ours["hitl_required"] == true,
        "hitl_required {}",
        ours["hitl_required"]
    );
    ensure!(ours["requires_yaml_optimization"] == false, "yaml flag set");
    let content = ours["anti_skill_constraints"][0]["content"]
        .as_str()
        .unwrap_or("");
    ensure!(
        content.starts_with("Never execute HTTP without timeout"),
        "constraint {content:?}"
    );
    Ok(format!(
        "{} top-level fields equal",
        listing.as_object().unwrap().len()
    ))
}

fn injection_oracle() -> Outcome {
    let start = Instant::now();
    let corpus = keyword_corpus(1000, 7);
    let compiler = Compiler::with_baseline(trusting());
    let mut agree = 0;
    for (spec, plan) in &corpus {
        let v = compiler
            .check(&source(spec))
            .map_err(|e| format!("{}: {e:?}", spec.name))?;
        let surface: Vec<&str> = scan_surface(&v.ir).collect();
        let oracle = owned(&oracle_triggered(&surface));
        ensure!(
            v.triggered_rule_ids == oracle,
            "{}: {:?} vs oracle {:?}",
            spec.name,
            v.triggered_rule_ids,
            oracle
        );
        ensure!(
            v.triggered_rule_ids == owned(plan),
            "{}: {:?} vs plan {:?}",
            spec.name,
            v.triggered_rule_ids,
            plan
        );
        let again =
            optimize(&v.ir, compiler.baseline(), compiler.rules()).map_err(|e| format!("{e:?}"))?;
        ensure!(
            again.ir == v.ir,
            "{}: second pass changed the IR",
            spec.name
        );
        agree += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < ORACLE_RUNTIME, "took {elapsed:?}");
    Ok(format!("{agree}/1000 agree, idempotent, {elapsed:.1?}"))
}

fn trigger_distribution() -> Outcome {
    let corpus = distribution_corpus(3);
    ensure!(
        corpus.len() == DISTRIBUTION_TOTAL,
        "corpus has {} skills",
        corpus.len()
    );
    let compiler = Compiler::with_baseline(trusting());
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut triggered = 0;
    for (spec, plan) in &corpus {
        let v = compiler
            .check(&source(spec))
            .map_err(|e| format!("{}: {e:?}", spec.name))?;
        ensure!(
            v.triggered_rule_ids == owned(plan),
            "{}: {:?} vs {:?}",
            spec.name,
            v.triggered_rule_ids,
            plan
        );
        for id in &v.triggered_rule_ids {
            *counts.entry(id.clone()).or_default() += 1;
        }
        triggered += usize::from(!v.triggered_rule_ids.is_empty());
    }
    let mut parts = Vec::new();
    for (id, expected) in DISTRIBUTION {
        let got = counts.get(id).copied().unwrap_or(0);
        ensure!(got == expected, "{id}: {got} != {expected}");
        parts.push(format!(
            "{id} {got} ({:.1}%)",
            100.0 * got as f64 / DISTRIBUTION_TOTAL as f64
        ));
    }
    ensure!(
        triggered == DISTRIBUTION_TRIGGERED,
        "triggered {triggered} != {DISTRIBUTION_TRIGGERED}"
    );
    Ok(format!(
        "{}; overall {triggered}/{DISTRIBUTION_TOTAL} = {:.1}%",
        parts.join(", "),
        100.0 * triggered as f64 / DISTRIBUTION_TOTAL as f64
    ))
}

fn interception_taxonomy() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = interception_corpus(231, 17);
    let skills = tmp.path().join("skills");
    let specs: Vec<SkillSpec> = corpus.iter().map(|(s, _)| s.clone()).collect();
    write_corpus(&skills, &specs).unwrap();
    let baseline = trusting_baseline_file(tmp.path());
    let args = [
        "build",
        path_str(&skills),
        "--baseline",
        path_str(&baseline),
        "--out",
        "dist",
        "--no-timestamps",
    ];

    let o = skillc(tmp.path(), &args);
    let summary = String::from_utf8_lossy(&o.stdout).trim().to_owned();
    ensure!(
        summary.starts_with("compiled 221, intercepted 10,"),
        "summary {summary:?}"
    );
    ensure!(o.status.code() == Some(2), "exit {:?}", o.status.code());

    let mut json_args = vec!["--format", "json"];
    json_args.extend(args);
    let o = skillc(tmp.path(), &json_args);
    ensure!(
        o.status.code() == Some(2),
        "json exit {:?}",
        o.status.code()
    );
    let doc: Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    let expected: BTreeMap<String, &str> = corpus
        .iter()
        .filter_map(|(spec, kind)| {
            let category = match kind {
                Seeded::Clean => return None,
                Seeded::Frontmatter => "yaml_violation",
                Seeded::Permission => "security_interception",
                Seeded::Schema => "schema_violation",
            };
            Some((spec.name.clone(), category))
        })
        .collect();
    let mut by_category: BTreeMap<String, usize> = BTreeMap::new();
    for skill in doc["skills"].as_array().unwrap() {
        if skill["status"] != "intercepted" {
            continue;
        }
        let category = skill["category"].as_str().unwrap_or("?").to_owned();
        let path = PathBuf::from(skill["path"].as_str().unwrap());
        let dir = path
            .parent()
            .and_then(Path::file_name)
            .unwrap()
            .to_string_lossy()
            .into_owned();
        ensure!(
            expected.get(&dir).copied() == Some(category.as_str()),
            "{dir} intercepted as {category}, seeded {:?}",
            expected.get(&dir)
        );
        *by_category.entry(category).or_default() += 1;
    }
    let triple = (
        by_category.get("yaml_violation").copied().unwrap_or(0),
        by_category
            .get("security_interception")
            .copied()
            .unwrap_or(0),
        by_category.get("schema_violation").copied().unwrap_or(0),
    );
    ensure!(triple == (5, 4, 1), "categories {triple:?}");
    Ok(format!("{summary}; categories {triple:?}; exit 2"))
}

fn batch_seconds(compiler: &Compiler, sources: &[SourceFile]) -> f64 {
    let start = Instant::now();
    let compiled: Vec<_> = sources
        .iter()
        .map(|s| compiler.compile(s).expect("corpus compiles"))
        .collect();
    generate_manifest(compiled.iter().map(|c| &c.validated)).expect("unique names");
    start.elapsed().as_secs_f64()
}

fn best_of(runs: usize, f: impl Fn() -> f64) -> f64 {
    (0..runs).map(|_| f()).fold(f64::INFINITY, f64::min)
}

fn latency() -> Outcome {
    let compiler = Compiler::with_baseline(trusting());
    let corpus = latency_corpus(225, 23);
    let sources: Vec<SourceFile> = corpus.iter().map(source).collect();
    // Warm caches and lazily built globs before timing.
    for s in sources.iter().take(10) {
        compiler.compile(s).unwrap();
    }
    let reports: Vec<_> = sources
        .iter()
        .map(|s| measure_compile(s, &compiler))
        .collect();
    for r in &reports {
        ensure!(r.interception.is_none(), "{} intercepted", r.skill_name);
        ensure!(
            r.per_target_tokens.len() == 4,
            "{} has {} targets",
            r.skill_name,
            r.per_target_tokens.len()
        );
    }
    let mean = reports.iter().map(|r| r.duration_ms).sum::<f64>() / reports.len() as f64;
    let max = reports.iter().map(|r| r.duration_ms).fold(0.0, f64::max);

    // The large batch is the small batch nine times over under fresh names,
    // so per-skill work is identical and only batch overhead can differ.
    let small: Vec<SourceFile> = corpus[..25].iter().map(source).collect();
    let large: Vec<SourceFile> = (0..9)
        .flat_map(|round| {
            corpus[..25].iter().map(move |spec| {
                let mut renamed = spec.clone();
                renamed.name = format!("{}-r{round}", spec.name);
                source(&renamed)
            })
        })
        .collect();
    let t_small = best_of(7, || batch_seconds(&compiler, &small));
    let t_large = best_of(5, || batch_seconds(&compiler, &large));
    let ratio = (t_large / t_small) / 9.0;

    ensure!(mean <= MEAN_LATENCY_MS, "mean {mean:.2} ms");
    ensure!(max <= MAX_LATENCY_MS, "max {max:.2} ms");
    ensure!(
        (ratio - 1.0).abs() <= SCALING_TOLERANCE,
        "225/25 scaling is {ratio:.3} of linear"
    );
    Ok(format!(
        "mean {mean:.2} ms, max {max:.2} ms, 25 -> 225 at {ratio:.3}x linear ({:.1} ms -> {:.1} ms)",
        t_small * 1e3,
        t_large * 1e3
    ))
}

fn depth_oracle() -> Outcome {
    let schemas = sample(common::schema(), 500);
    let mut deepest = 0;
    for s in &schemas {
        let json = serde_json::to_value(s).unwrap();
        let (ours, oracle) = (max_nesting_depth(s), oracle_depth(&json));
        ensure!(ours == oracle, "depth {ours} != oracle {oracle} for {json}");
        ensure!(
            detect_yaml_optimization(Some(s)) == (oracle >= YAML_DEPTH_THRESHOLD),
            "flag mismatch for {json}"
        );
        deepest = deepest.max(ours);
    }
    let compiler = Compiler::with_baseline(trusting());
    let anchor = |name: &str| {
        let path = fixtures().join("skills").join(name).join("SKILL.md");
        let src =
            SourceFile::from_bytes(path.display().to_string(), fs::read(&path).unwrap()).unwrap();
        let ir = compiler.check(&src).unwrap().ir;
        (ir.schema_depth(), ir.requires_yaml_optimization)
    };
    ensure!(
        anchor("github-api-client") == (2, false),
        "github anchor {:?}",
        anchor("github-api-client")
    );
    ensure!(
        anchor("data-migration") == (4, true),
        "data-migration anchor {:?}",
        anchor("data-migration")
    );
    Ok(format!(
        "500/500 agree (max depth {deepest}); anchors 2->false, 4->true"
    ))
}

fn parsed_texts(target: &EmitterId, doc: &str) -> Option<Vec<String>> {
    fn strings(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::String(s) => out.push(s.clone()),
            Value::Array(xs) => xs.iter().for_each(|x| strings(x, out)),
            Value::Object(m) => m.values().for_each(|x| strings(x, out)),
            _ => {}
        }
    }
    if *target == EmitterId::CLAUDE || *target == EmitterId::CODEX {
        xml_texts(doc)
    } else if *target == json_ir() {
        let mut out = Vec::new();
        strings(&serde_json::from_str(doc).ok()?, &mut out);
        Some(out)
    } else {
        Some(vec![doc.to_owned()])
    }
}

fn constraint_preservation() -> Outcome {
    let registry = five_targets();
    ensure!(registry.len() == 5, "{} targets registered", registry.len());
    let irs = sample(common::skill_ir(), 100);
    let mut checked = 0;
    for ir in irs {
        let skill = ValidatedSkillIR {
            ir,
            diagnostics: Vec::new(),
            triggered_rule_ids: BTreeSet::new(),
        };
        for (target, result) in registry.emit_all(&skill) {
            let artifact = result.map_err(|e| format!("{target}: {e}"))?;
            let texts = parsed_texts(&target, &artifact.main_document)
                .ok_or_else(|| format!("{target} emitted an unparseable document"))?;
            for c in &skill.ir.anti_skill_constraints {
                ensure!(
                    texts.iter().any(|t| t.contains(&c.content)),
                    "{target} lost {:?}",
                    c.content
                );
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} constraint occurrences over 100 IRs x 5 targets, 0 lost"
    ))
}

fn extensibility() -> Outcome {
    let corpus = latency_corpus(40, 31);
    let four = Compiler::new(
        trusting(),
        RuleSet::builtin(),
        EmitterRegistry::with_builtins(),
    );
    let five = Compiler::new(trusting(), RuleSet::builtin(), five_targets());
    for spec in &corpus {
        let src = source(spec);
        let a = four.compile(&src).map_err(|e| format!("{e:?}"))?;
        let b = five.compile(&src).map_err(|e| format!("{e:?}"))?;
        ensure!(
            a.validated == b.validated,
            "{}: phases 1-3 differ with a fifth target",
            spec.name
        );
        for id in EmitterId::BUILTINS {
            ensure!(
                a.artifacts[&id] == b.artifacts[&id],
                "{}: {id} output changed",
                spec.name
            );
        }
        ensure!(b.artifacts.contains_key(&json_ir()), "fifth target missing");
    }
    let m = corpus.len() as u64;
    for (compiler, n) in [(&four, 4u64), (&five, 5)] {
        let c = compiler.pass_counts();
        ensure!(
            (c.parse, c.build_ir, c.optimize) == (m, m, m),
            "{n} targets: phases 1-3 ran {c:?}"
        );
        ensure!(c.emit == m * n, "{n} targets: emit ran {}", c.emit);
    }
    Ok(format!(
        "phases 1-3 ran {m}x for 4 and 5 targets; emit {}x and {}x",
        m * 4,
        m * 5
    ))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let skills = tmp.path().join("skills");
    for entry in fs::read_dir(fixtures().join("skills")).unwrap() {
        let entry = entry.unwrap();
        let dest = skills.join(entry.file_name());
        fs::create_dir_all(&dest).unwrap();
        fs::copy(entry.path().join("SKILL.md"), dest.join("SKILL.md")).unwrap();
    }
    write_corpus(&skills, &latency_corpus(60, 41)).unwrap();
    write_corpus(
        &skills,
        &interception_corpus(12, 43)
            .into_iter()
            .map(|(s, _)| s)
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let baseline = trusting_baseline_file(tmp.path());
    let build = |jobs: &str, out: &str| {
        skillc(
            tmp.path(),
            &[
                "build",
                "skills",
                "--baseline",
                path_str(&baseline),
                "--out",
                out,
                "--jobs",
                jobs,
                "--no-timestamps",
                "--emit-ir",
            ],
        )
    };
    let a = build("1", "one");
    let b = build("8", "eight");
    ensure!(a.status.code() == b.status.code(), "exit codes differ");
    ensure!(a.stdout == b.stdout, "summaries differ");
    let (ta, tb) = (
        tree(&tmp.path().join("one")),
        tree(&tmp.path().join("eight")),
    );
    ensure!(!ta.is_empty(), "nothing written");
    let differing: Vec<_> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).collect();
    ensure!(
        ta.len() == tb.len() && differing.is_empty(),
        "trees differ: {differing:?}"
    );
    Ok(format!(
        "{} files identical at --jobs 1 and --jobs 8",
        ta.len()
    ))
}

fn manifest_contract() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = manifest_corpus(50, 11);
    write_corpus(&tmp.path().join("skills"), &corpus).unwrap();
    let o = skillc(
        tmp.path(),
        &["index", "skills", "--out", "dist", "--targets", "claude"],
    );
    ensure!(
        o.status.code() == Some(0),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    let manifest: Value =
        serde_json::from_slice(&fs::read(tmp.path().join("dist/claude/manifest.json")).unwrap())
            .unwrap();
    let entries = manifest["skills"].as_array().cloned().unwrap_or_default();
    ensure!(entries.len() == 50, "{} entries", entries.len());
    let mut worst = 0;
    for e in &entries {
        let keys: Vec<&str> = e.as_object().unwrap().keys().map(String::as_str).collect();
        ensure!(
            keys == ["name", "description", "security_level", "hitl_required"],
            "keys {keys:?}"
        );
        let tokens = estimate_tokens(&serde_json::to_string_pretty(e).unwrap());
        ensure!(
            tokens <= MANIFEST_ENTRY_TOKENS,
            "{} costs {tokens} tokens",
            e["name"]
        );
        worst = worst.max(tokens);
    }
    Ok(format!("50 entries, 4 fields each, max {worst} tokens"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("golden emission", golden_emission),
        ("IR fidelity", ir_fidelity),
        ("injection oracle", injection_oracle),
        ("trigger coverage", trigger_distribution),
        ("interception taxonomy", interception_taxonomy),
        ("latency bound", latency),
        ("depth oracle", depth_oracle),
        (
            "cross-target constraint preservation",
            constraint_preservation,
        ),
        ("extensibility", extensibility),
        ("determinism", determinism),
        ("manifest contract", manifest_contract),
    ];
    // Written to the raw handle so the lines survive libtest's capture.
    let mut stdout = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| (*s).to_owned()))
                .unwrap_or_else(|| "panicked".to_owned()))
        });
        match outcome {
            Ok(detail) => writeln!(stdout, "PASS {:>2} {name}: {detail}", i + 1).unwrap(),
            Err(why) => {
                writeln!(stdout, "FAIL {:>2} {name}: {why}", i + 1).unwrap();
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
