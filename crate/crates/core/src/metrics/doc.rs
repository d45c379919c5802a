use serde::{Deserialize, Serialize};

use crate::model::EntityGroup;
use crate::text::{char_len, contains_ci};

/// Fraction of ground-truth values still present, case-insensitively, in
/// `output`. `None` when there is no ground truth.
pub fn leak_rate<S: AsRef<str>>(output: &str, gt: &[S]) -> Option<f64> {
    if gt.is_empty() {
        return None;
    }
    let leaked = gt.iter().filter(|v| !v.as_ref().is_empty() && contains_ci(output, v.as_ref())).count();
    Some(leaked as f64 / gt.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    /// Over multi-mention groups: all mentions got one surrogate and the
    /// output holds at least that many occurrences of it.
    pub rate: Option<f64>,
    /// Same, judged from the decisions alone.
    pub from_decisions: Option<f64>,
    /// Set when the two disagree, i.e. splicing lost a mention.
    pub discrepancy: bool,
}

/// Non-overlapping exact occurrences of `needle`.
pub fn count_occurrences(haystack: &str, needle: &str) -> usize {
    if needle.is_empty() {
        return 0;
    }
    haystack.matches(needle).count()
}

/// `surrogates[i]` is what span `i` was replaced with.
pub fn consistency_rate(groups: &[EntityGroup], surrogates: &[String], output: &str) -> Consistency {
    let mut multi = 0usize;
    let mut agreed = 0usize;
    let mut verified = 0usize;
    for group in groups.iter().filter(|g| g.members.len() >= 2) {
        multi += 1;
        let first = &surrogates[group.members[0]];
        if group.members.iter().all(|&m| surrogates[m] == *first) {
            agreed += 1;
            if count_occurrences(output, first.trim()) >= group.members.len() {
                verified += 1;
            }
        }
    }
    let rate = |k: usize| (multi > 0).then(|| k as f64 / multi as f64);
    Consistency { rate: rate(verified), from_decisions: rate(agreed), discrepancy: verified != agreed }
}

/// `1 - |len(out) - len(in)| / len(in)` over characters.
pub fn length_preservation(input: &str, output: &str) -> Option<f64> {
    let a = char_len(input);
    if a == 0 {
        return None;
    }
    let b = char_len(output);
    Some(1.0 - (a as f64 - b as f64).abs() / a as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DocMetrics {
    pub leak: Option<f64>,
    pub consistency: Option<f64>,
    #[serde(default)]
    pub consistency_discrepancy: bool,
    pub length_pres: Option<f64>,
    pub ppl: Option<f64>,
}

/// Unweighted means over documents, skipping undefined values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusMetrics {
    pub docs: usize,
    pub leak: Option<f64>,
    pub consistency: Option<f64>,
    pub consistency_discrepancies: usize,
    pub length_pres: Option<f64>,
    pub ppl: Option<f64>,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn aggregate(docs: &[DocMetrics]) -> CorpusMetrics {
    CorpusMetrics {
        docs: docs.len(),
        leak: mean_defined(docs.iter().map(|d| d.leak)),
        consistency: mean_defined(docs.iter().map(|d| d.consistency)),
        consistency_discrepancies: docs.iter().filter(|d| d.consistency_discrepancy).count(),
        length_pres: mean_defined(docs.iter().map(|d| d.length_pres)),
        ppl: mean_defined(docs.iter().map(|d| d.ppl)),
    }
}
