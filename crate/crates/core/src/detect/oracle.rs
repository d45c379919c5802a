use super::{resolve_overlaps, Candidate};
use crate::model::{CorpusRecord, PiiSpan};
use crate::text::{find_ci, CharIndex};

/// Spans for every case-insensitive occurrence of a ground-truth value.
pub fn detect_oracle(record: &CorpusRecord) -> Vec<PiiSpan> {
    let text = &record.text;
    let index = CharIndex::new(text);
    let chars: Vec<char> = text.chars().collect();
    let mut candidates = Vec::new();
    for (priority, (label, value)) in record.gt_values().enumerate() {
        let needle: Vec<char> = value.chars().collect();
        for start in find_ci(&chars, &needle) {
            candidates.push(Candidate { start, end: start + needle.len(), label, priority });
        }
    }
    resolve_overlaps(text, &index, candidates)
}
