//! Downstream NER utility: does a tagger trained on substituted text still
//! find PII in original text?

mod annotate;
mod eval;
mod experiment;
mod tagger;
mod tokenize;

pub use annotate::{annotate_original, annotate_substituted, resolve_longest_first, AnnotatedDoc};
pub use eval::{eval_span_f1, match_spans, prf, MatchRule, Prf};
pub use experiment::{
    format_ner_table, run_experiment, stratified_split, NerConfig, NerResults, NerRow, Stat, SubstitutedDoc,
    WelchComparison, ORIGINAL,
};
pub use tagger::{bio_tags, decode_bio, train_tagger, TaggerModel, DEFAULT_ITERATIONS};
pub use tokenize::{tokenize, Token};
