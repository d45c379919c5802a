//! Span detection backends.
//!
//! Every detector returns spans that are sorted, non-overlapping,
//! in-bounds, and whose surface equals the document slice. The shared
//! [`validate_spans`] check enforces that post-condition.

mod bioes;
mod external;
mod oracle;
mod rules;

pub use bioes::{decode_bioes, encode_bioes, parse_tag, BioesTag, TaggedToken};
pub use external::{detect_external, ExternalDetector};
pub use oracle::detect_oracle;
pub use rules::detect_rules;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CorpusRecord, Label, PiiSpan};
use crate::text::CharIndex;

/// Which detector a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    /// Ground-truth substring search.
    #[default]
    Oracle,
    /// Built-in regular-expression detector.
    Rules,
    /// External process speaking the JSON span protocol.
    External,
}

/// A configured detector.
pub enum Detector {
    Oracle,
    Rules,
    External(ExternalDetector),
}

impl Detector {
    pub fn detect(&self, record: &CorpusRecord) -> Result<Vec<PiiSpan>> {
        match self {
            Detector::Oracle => Ok(detect_oracle(record)),
            Detector::Rules => Ok(detect_rules(&record.text)),
            Detector::External(ext) => ext.detect(&record.text),
        }
    }
}

/// Candidate span before overlap resolution. `priority` breaks ties
/// between equally long candidates at the same start (lower wins).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub start: usize,
    pub end: usize,
    pub label: Label,
    pub priority: usize,
}

/// Longest first, then leftmost, then lowest priority.
pub(crate) fn resolve_overlaps(text: &str, index: &CharIndex, mut candidates: Vec<Candidate>) -> Vec<PiiSpan> {
    candidates.sort_by(|a, b| {
        (b.end - b.start).cmp(&(a.end - a.start)).then(a.start.cmp(&b.start)).then(a.priority.cmp(&b.priority))
    });
    let mut kept: Vec<Candidate> = Vec::new();
    for c in candidates {
        if c.start >= c.end {
            continue;
        }
        if kept.iter().all(|k| c.end <= k.start || k.end <= c.start) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|c| c.start);
    kept.into_iter()
        .map(|c| PiiSpan {
            start: c.start,
            end: c.end,
            label: c.label,
            surface: index.slice(text, c.start, c.end).to_string(),
        })
        .collect()
}

/// Checks the detector post-condition.
pub fn validate_spans(text: &str, spans: &[PiiSpan]) -> Result<()> {
    let index = CharIndex::new(text);
    let mut prev_end = 0;
    for (i, span) in spans.iter().enumerate() {
        if span.start >= span.end || span.end > index.len() {
            return Err(Error::SpanOutOfBounds { start: span.start, end: span.end, len: index.len() });
        }
        if i > 0 && span.start < prev_end {
            let p = &spans[i - 1];
            return Err(Error::SpliceOverlap(p.start, p.end, span.start, span.end));
        }
        if index.slice(text, span.start, span.end) != span.surface {
            return Err(Error::DetectorProtocol(format!("surface mismatch at [{}, {})", span.start, span.end)));
        }
        prev_end = span.end;
    }
    Ok(())
}
