//! Shared domain types.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::CharIndex;

/// The eight PII categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Person,
    Address,
    Date,
    Email,
    Phone,
    #[serde(alias = "ACCT")]
    Account,
    Url,
    Secret,
}

impl Label {
    pub const ALL: [Label; 8] = [
        Label::Person,
        Label::Address,
        Label::Date,
        Label::Email,
        Label::Phone,
        Label::Account,
        Label::Url,
        Label::Secret,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Label::Person => "PERSON",
            Label::Address => "ADDRESS",
            Label::Date => "DATE",
            Label::Email => "EMAIL",
            Label::Phone => "PHONE",
            Label::Account => "ACCOUNT",
            Label::Url => "URL",
            Label::Secret => "SECRET",
        }
    }

    /// Labels whose surrogates come from a small language model in hybrid mode.
    pub fn is_contextual(self) -> bool {
        matches!(self, Label::Person | Label::Address | Label::Date)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "ACCT" {
            return Ok(Label::Account);
        }
        Label::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// Substitution mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Redact,
    Faker,
    Hybrid,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Redact, Mode::Faker, Mode::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Redact => "redact",
            Mode::Faker => "faker",
            Mode::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected redact, faker or hybrid)"))
    }
}

/// A detected span in char offsets, `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiiSpan {
    pub start: usize,
    pub end: usize,
    pub label: Label,
    pub surface: String,
}

impl PiiSpan {
    /// Builds a span whose surface is the slice of `text`.
    pub fn from_text(text: &str, index: &CharIndex, start: usize, end: usize, label: Label) -> Result<Self> {
        if start >= end || end > index.len() {
            return Err(Error::SpanOutOfBounds { start, end, len: index.len() });
        }
        Ok(Self { start, end, label, surface: index.slice(text, start, end).to_string() })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn overlaps(&self, other: &PiiSpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// All mentions sharing a canonical surface and label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityGroup {
    pub canonical: String,
    pub label: Label,
    /// Indices into the span list the group was resolved from.
    pub members: Vec<usize>,
}

/// One corpus document with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
    pub locale: String,
    pub template: String,
    pub pii_gt: BTreeMap<Label, Vec<String>>,
}

impl CorpusRecord {
    pub fn gt_values(&self) -> impl Iterator<Item = (Label, &str)> {
        self.pii_gt.iter().flat_map(|(label, values)| values.iter().map(move |v| (*label, v.as_str())))
    }

    pub fn gt_count(&self) -> usize {
        self.pii_gt.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionSource {
    Slm,
    Fake,
    Redact,
    FallbackFake,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    Empty,
    Identity,
    PunctuationOnly,
}

/// The replacement chosen for one entity, with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurrogateDecision {
    pub surrogate: String,
    pub source: DecisionSource,
    #[serde(default)]
    pub demos_used: Vec<String>,
    #[serde(default)]
    pub rejection_reasons: Vec<RejectionReason>,
    /// Pool key the input was classified into, e.g. `person/zh`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    /// Pool the demonstrations were drawn from. Differs from `class` under
    /// the fixed three-shot strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<String>,
}

impl SurrogateDecision {
    pub fn plain(surrogate: impl Into<String>, source: DecisionSource) -> Self {
        Self {
            surrogate: surrogate.into(),
            source,
            demos_used: Vec::new(),
            rejection_reasons: Vec::new(),
            class: None,
            pool: None,
        }
    }

    /// Checks the source/provenance invariants.
    pub fn is_well_formed(&self) -> bool {
        match self.source {
            DecisionSource::Slm => self.demos_used.len() == 3 && self.rejection_reasons.is_empty(),
            DecisionSource::FallbackFake => !self.rejection_reasons.is_empty(),
            _ => true,
        }
    }

    pub fn is_slm_call(&self) -> bool {
        matches!(self.source, DecisionSource::Slm | DecisionSource::FallbackFake)
    }
}

/// Cache identity of a surrogate proposal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CacheKey {
    pub mode: Mode,
    /// Proposer backend identifier: the SLM id, `fake` or `redact`.
    pub family: String,
    pub canonical: String,
    pub label: Label,
}

/// Lowercases, trims, and collapses internal whitespace runs to one space.
pub fn canonicalize(surface: &str) -> Result<String> {
    let collapsed = surface.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.is_empty() {
        return Err(Error::EmptyCanonical);
    }
    Ok(collapsed.to_lowercase())
}
