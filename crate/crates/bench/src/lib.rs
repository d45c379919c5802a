//! Shared fixtures for the benchmarks under `benches/`.

use surrogate_core::corpus::{synth_corpus, LocaleMix};
use surrogate_core::pipeline::{RunConfig, ScorerConfig, SynthConfig};
use surrogate_core::{CorpusRecord, Mode};

/// Deterministic multilingual corpus.
pub fn corpus(n: usize) -> Vec<CorpusRecord> {
    synth_corpus(n, 7, &LocaleMix::default())
}

/// A single-mode run over a synthetic corpus, without perplexity scoring.
pub fn run_config(mode: Mode, n: usize) -> RunConfig {
    RunConfig {
        modes: vec![mode],
        synth: SynthConfig { n, seed: 7, ..SynthConfig::default() },
        scorer: ScorerConfig::None,
        ..RunConfig::default()
    }
}
