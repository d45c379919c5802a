use serde::Deserialize;

use super::{resolve_overlaps, Candidate};
use crate::adapter::{AdapterConfig, CommandAdapter};
use crate::error::{Error, Result};
use crate::model::{Label, PiiSpan};
use crate::text::CharIndex;

/// Detector reached through a subprocess. The document is sent as UTF-8
/// text and the response is one JSON line: either
/// `{"spans": [{"start": 0, "end": 4, "label": "PERSON"}]}` or the bare
/// array. Offsets are char offsets.
#[derive(Debug, Clone)]
pub struct ExternalDetector {
    adapter: CommandAdapter,
}

#[derive(Deserialize)]
struct WireSpan {
    start: usize,
    end: usize,
    label: Label,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WireResponse {
    Wrapped { spans: Vec<WireSpan> },
    Bare(Vec<WireSpan>),
}

impl ExternalDetector {
    pub fn new(config: &AdapterConfig) -> Result<Self> {
        let adapter = CommandAdapter::new(config).map_err(|e| Error::DetectorUnavailable(e.to_string()))?;
        Ok(Self { adapter })
    }

    pub fn detect(&self, text: &str) -> Result<Vec<PiiSpan>> {
        let raw = self.adapter.run(text).map_err(|e| Error::DetectorUnavailable(e.to_string()))?;
        parse_response(text, &raw)
    }
}

/// Runs a one-off external detection with `config`.
pub fn detect_external(text: &str, config: &AdapterConfig) -> Result<Vec<PiiSpan>> {
    ExternalDetector::new(config)?.detect(text)
}

pub(crate) fn parse_response(text: &str, raw: &str) -> Result<Vec<PiiSpan>> {
    let line = raw
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| Error::DetectorProtocol("empty response".into()))?;
    let wire: WireResponse =
        serde_json::from_str(line).map_err(|e| Error::DetectorProtocol(format!("malformed response: {e}")))?;
    let spans = match wire {
        WireResponse::Wrapped { spans } | WireResponse::Bare(spans) => spans,
    };
    let index = CharIndex::new(text);
    let mut candidates = Vec::with_capacity(spans.len());
    for (priority, s) in spans.into_iter().enumerate() {
        if s.start >= s.end || s.end > index.len() {
            return Err(Error::DetectorProtocol(format!(
                "span [{}, {}) out of bounds for length {}",
                s.start,
                s.end,
                index.len()
            )));
        }
        candidates.push(Candidate { start: s.start, end: s.end, label: s.label, priority });
    }
    Ok(resolve_overlaps(text, &index, candidates))
}
