//! Locale-aware PII detection and surrogate substitution, with the
//! evaluation harness around it.

pub mod adapter;
pub mod cache;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod generation;
pub mod locale;
pub mod metrics;
pub mod model;
pub mod ner;
pub mod pipeline;
pub mod prompting;
pub mod report;
pub mod text;

pub use cache::{resolve_entities, CacheCounters, SurrogateCache};
pub use error::{Error, Result};
pub use model::{
    canonicalize, CacheKey, CorpusRecord, DecisionSource, EntityGroup, Label, Mode, PiiSpan, RejectionReason,
    SurrogateDecision,
};
pub use pipeline::{run_corpus, RunConfig, RunResults};
