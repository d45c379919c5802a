//! Evaluation metrics.

mod distinct;
mod doc;
mod ppl;
mod welch;

pub use distinct::{distinctness, round3, DistinctRow, DistinctnessReport};
pub use doc::{
    aggregate, consistency_rate, count_occurrences, leak_rate, length_preservation, Consistency, CorpusMetrics,
    DocMetrics,
};
pub use ppl::{ExternalScorer, NgramScorer, PplScorer, DEFAULT_CHUNK};
pub use welch::{mean, pstdev, stdev, welch, SdKind, Summary, WelchResult};
