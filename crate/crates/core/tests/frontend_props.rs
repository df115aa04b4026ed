use proptest::collection::vec;
use proptest::prelude::*;
use skillc_core::diagnostics::{render_diagnostic, Diagnostic, DiagnosticCode, Span};
use skillc_core::frontend::{lower_markdown, parse_skill, BlockKind, SourceFile};

fn body_line() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => Just(String::new()),
        1 => Just("   ".to_owned()),
        1 => Just("## Procedures".to_owned()),
        1 => Just("## Examples".to_owned()),
        1 => Just("## Input Schema".to_owned()),
        1 => Just("# Notes".to_owned()),
        3 => "[a-z]{1,8}".prop_map(|w| format!("1. {w} the thing")),
        1 => Just("2. Fetch data **[CRITICAL]**".to_owned()),
        2 => "[a-z]{1,8}".prop_map(|w| format!("- {w}")),
        2 => "[a-z]{1,8}".prop_map(|w| format!("   continued {w}")),
        1 => Just("```python".to_owned()),
        1 => Just("```json".to_owned()),
        1 => Just("```".to_owned()),
        1 => Just("~~~~".to_owned()),
        1 => Just("**Input:** some input".to_owned()),
        1 => Just("**Output**: some output".to_owned()),
        1 => Just("**Input:**".to_owned()),
        4 => "[A-Za-zé中 ,.]{1,30}",
    ]
}

fn non_blank(text: &str) -> Vec<&str> {
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .collect()
}

/// 0-based line index of each byte offset, counted directly.
fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset]
        .iter()
        .filter(|b| **b == b'\n')
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spans_reconstruct_every_non_blank_line_once(lines in vec(body_line(), 200), crlf in any::<bool>()) {
        let body = lines.join(if crlf { "\r\n" } else { "\n" });
        let blocks = lower_markdown(&body);

        let mut coverage = vec![0usize; body.split('\n').count()];
        let mut previous_end = 0;
        let mut rebuilt = Vec::new();
        for b in &blocks {
            prop_assert!(b.span.start_byte >= previous_end, "overlapping spans");
            previous_end = b.span.end_byte;
            let (first, last) = (line_of(&body, b.span.start_byte), line_of(&body, b.span.end_byte));
            coverage[first..=last].iter_mut().for_each(|c| *c += 1);
            rebuilt.extend(non_blank(&body[b.span.start_byte..b.span.end_byte]));
        }
        prop_assert_eq!(rebuilt, non_blank(&body));
        for (i, raw) in body.split('\n').enumerate() {
            if !raw.trim().is_empty() {
                prop_assert_eq!(coverage[i], 1, "line {} covered {} times", i + 1, coverage[i]);
            }
        }
        for b in &blocks {
            if let BlockKind::Paragraph { text } = &b.kind {
                let expected = non_blank(&body[b.span.start_byte..b.span.end_byte]).join("\n");
                prop_assert_eq!(text, &expected);
            }
        }
    }

    #[test]
    fn parsing_is_deterministic(lines in vec(body_line(), 0..60)) {
        let text = format!("---\nname: s\nversion: 1.0.0\ndescription: d\n---\n{}", lines.join("\n"));
        let src = SourceFile::from_text("s/SKILL.md", &text);
        let a = parse_skill(&src).unwrap();
        let b = parse_skill(&src).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn caret_sits_under_the_offending_column(
        prefix in "[a-zé中ß ]{0,12}",
        target in "[a-z中]{1,6}",
        line_no in 0usize..5,
    ) {
        let mut text: String = (0..line_no).map(|i| format!("line {i} ok\n")).collect();
        let start = text.len() + prefix.len();
        text.push_str(&prefix);
        text.push_str(&target);
        text.push_str(" tail\n");
        let src = SourceFile::from_text("x", &text);
        let span = Span::from_range(&text, start, start + target.len());
        let rendered = render_diagnostic(&Diagnostic::warning(DiagnosticCode::PermBroad, "m"), Some(&src));
        prop_assert_eq!(rendered.lines().count(), 1);
        let rendered = render_diagnostic(
            &Diagnostic::warning(DiagnosticCode::PermBroad, "m").with_span(span),
            Some(&src),
        );
        let lines: Vec<&str> = rendered.lines().collect();
        let expected_col = prefix.chars().count() + 1;
        prop_assert_eq!(span.start_line, line_no + 1);
        prop_assert_eq!(span.start_col, expected_col);
        let (gutter, shown) = lines[1].split_once(" | ").unwrap();
        prop_assert_eq!(gutter.trim(), (line_no + 1).to_string());
        prop_assert_eq!(shown, format!("{prefix}{target} tail"));
        let caret = lines[2].split_once(" | ").unwrap().1;
        prop_assert_eq!(caret.chars().take_while(|c| *c == ' ').count(), expected_col - 1);
        prop_assert_eq!(caret.trim_start().len(), target.chars().count());
    }
}

#[derive(Debug, Clone)]
enum ExtraValue {
    Int(i64),
    Bool(bool),
    Str(String),
    List(Vec<i64>),
    Map(String, String),
}

impl ExtraValue {
    fn yaml(&self) -> String {
        match self {
            ExtraValue::Int(n) => n.to_string(),
            ExtraValue::Bool(b) => b.to_string(),
            ExtraValue::Str(s) => serde_json::to_string(s).unwrap(),
            ExtraValue::List(xs) => format!("{xs:?}"),
            ExtraValue::Map(k, v) => format!("\n  {k}: {}", serde_json::to_string(v).unwrap()),
        }
    }
}

fn extra_value() -> impl Strategy<Value = ExtraValue> {
    prop_oneof![
        any::<i64>().prop_map(ExtraValue::Int),
        any::<bool>().prop_map(ExtraValue::Bool),
        "\\PC{0,20}".prop_map(ExtraValue::Str),
        vec(any::<i64>(), 0..4).prop_map(ExtraValue::List),
        ("[a-z]{1,6}", "[ -~]{0,10}").prop_map(|(k, v)| ExtraValue::Map(k, v)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raw_extra_round_trips_thirty_keys(values in vec(extra_value(), 30)) {
        let mut yaml = String::from("name: s\nversion: 1.0.0\ndescription: d\n");
        let keys: Vec<String> = (0..30).map(|i| format!("x_extra_{i:02}")).collect();
        for (k, v) in keys.iter().zip(&values) {
            yaml.push_str(&format!("{k}: {}\n", v.yaml()));
        }
        let src = SourceFile::from_text("s/SKILL.md", &format!("---\n{yaml}---\nbody\n"));
        let ast = parse_skill(&src).unwrap();

        let oracle: serde_yaml::Mapping = serde_yaml::from_str(&yaml).unwrap();
        let extra = &ast.frontmatter.raw_extra;
        prop_assert_eq!(extra.len(), 30);
        prop_assert_eq!(extra.keys().cloned().collect::<Vec<_>>(), keys.clone());
        for k in &keys {
            let expected = oracle.get(serde_yaml::Value::String(k.clone())).unwrap();
            prop_assert_eq!(&extra[k], expected);
        }
    }
}
