use serde::{Deserialize, Serialize};

use crate::detect::detect_oracle;
use crate::model::CorpusRecord;
use crate::text::find_ci;

/// Text with label-agnostic PII spans (char offsets, sorted, disjoint).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDoc {
    pub text: String,
    pub spans: Vec<(usize, usize)>,
}

/// Greedy longest-first selection of disjoint intervals, then sorted.
pub fn resolve_longest_first(mut spans: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    spans.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for s in spans {
        if s.0 < s.1 && kept.iter().all(|k| s.1 <= k.0 || k.1 <= s.0) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// Spans of the ground-truth values in the original text.
pub fn annotate_original(record: &CorpusRecord) -> AnnotatedDoc {
    let spans = detect_oracle(record).into_iter().map(|s| (s.start, s.end)).collect();
    AnnotatedDoc { text: record.text.clone(), spans }
}

/// Spans of the given surrogates in a substituted text, and how many of
/// the surrogates could not be found at all.
pub fn annotate_substituted<S: AsRef<str>>(text: &str, surrogates: &[S]) -> (AnnotatedDoc, usize) {
    let chars: Vec<char> = text.chars().collect();
    let mut found = Vec::new();
    let mut gaps = 0;
    let mut seen: Vec<&str> = Vec::new();
    for s in surrogates {
        let s = s.as_ref().trim();
        if s.is_empty() || seen.contains(&s) {
            continue;
        }
        seen.push(s);
        let needle: Vec<char> = s.chars().collect();
        let hits = find_ci(&chars, &needle);
        if hits.is_empty() {
            gaps += 1;
        }
        found.extend(hits.into_iter().map(|i| (i, i + needle.len())));
    }
    (AnnotatedDoc { text: text.to_string(), spans: resolve_longest_first(found) }, gaps)
}
