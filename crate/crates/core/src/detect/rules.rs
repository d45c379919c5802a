use std::sync::LazyLock;

use regex::Regex;

use super::{resolve_overlaps, Candidate};
use crate::model::{Label, PiiSpan};
use crate::text::CharIndex;

struct Rule {
    label: Label,
    regex: Regex,
    min_digits: usize,
}

static RULES: LazyLock<Vec<Rule>> = LazyLock::new(|| {
    let rule = |label, pattern: &str, min_digits| Rule { label, regex: Regex::new(pattern).unwrap(), min_digits };
    vec![
        rule(Label::Url, r"\b[A-Za-z][A-Za-z0-9+.-]*://[^\s<>\x22]+[^\s<>\x22.,;:!?)]", 0),
        rule(Label::Email, r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}", 0),
        rule(Label::Date, r"\b\d{1,2}-(?:Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)-\d{4}\b", 0),
        rule(Label::Date, r"\b\d{4}-\d{1,2}-\d{1,2}\b", 0),
        rule(Label::Date, r"\b\d{1,2}/\d{1,2}/\d{4}\b", 0),
        rule(Label::Phone, r"(?:\+\d{1,3}[ .-]?)?(?:\(\d{1,4}\)[ .-]?)?\d{2,5}(?:[ .-]\d{2,5}){1,4}\b", 7),
        rule(Label::Account, r"\b\d{8,}\b", 8),
    ]
});

/// Pattern detector for the high-regularity labels: URL, EMAIL, DATE,
/// PHONE and ACCOUNT. PERSON and ADDRESS are never produced.
pub fn detect_rules(text: &str) -> Vec<PiiSpan> {
    let index = CharIndex::new(text);
    let mut candidates = Vec::new();
    for (priority, rule) in RULES.iter().enumerate() {
        for m in rule.regex.find_iter(text) {
            let digits = m.as_str().chars().filter(char::is_ascii_digit).count();
            if digits < rule.min_digits {
                continue;
            }
            candidates.push(Candidate {
                start: index.char_at_byte(m.start()),
                end: index.char_at_byte(m.end()),
                label: rule.label,
                priority,
            });
        }
    }
    resolve_overlaps(text, &index, candidates)
}
