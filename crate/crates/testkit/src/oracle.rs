//! A brute-force keyword scanner written without the compiler's tokenizer.

use std::collections::BTreeSet;

/// Rule ids and trigger keywords of the four built-in rules.
pub const RULE_KEYWORDS: [(&str, &[&str]); 4] = [
    ("http-safety", &["HTTP", "GET", "POST", "fetch", "request"]),
    ("parse-safety", &["BeautifulSoup", "HTML parse", "scrape"]),
    ("db-safety", &["DROP", "DELETE", "TRUNCATE"]),
    ("loop-safety", &["while", "loop", "repeat"]),
];

/// Lowercases and replaces each run of non-alphanumerics by one space,
/// padding both ends, so a keyword phrase matches as ` phrase `.
fn normalize(text: &str) -> String {
    let mut out = String::from(" ");
    for c in text.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.ends_with(' ') {
            out.push(' ');
        }
    }
    if !out.ends_with(' ') {
        out.push(' ');
    }
    out
}

/// Rules whose keywords occur as whole words in any single text.
pub fn oracle_triggered(texts: &[&str]) -> BTreeSet<&'static str> {
    let normalized: Vec<String> = texts.iter().map(|t| normalize(t)).collect();
    RULE_KEYWORDS
        .iter()
        .filter(|(_, keywords)| {
            keywords.iter().any(|kw| {
                let needle = normalize(kw);
                normalized.iter().any(|text| text.contains(&needle))
            })
        })
        .map(|(id, _)| *id)
        .collect()
}
