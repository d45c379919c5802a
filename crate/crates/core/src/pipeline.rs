//! Corpus runs: detect, resolve, dispatch through the cache, splice and
//! score, for every requested mode; plus persistence of the results.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapter::AdapterConfig;
use crate::cache::{resolve_entities, CacheCounters, SurrogateCache};
use crate::corpus::{load_corpus, synth_corpus, LocaleMix};
use crate::detect::{detect_oracle, Detector, DetectorKind, ExternalDetector};
use crate::error::{Error, Result};
use crate::generation::{
    splice_with_offsets, BackendConfig, BackendHealth, FakeGenState, FakeStream, Proposer, SlmBackend,
};
use crate::metrics::{
    aggregate, consistency_rate, distinctness, leak_rate, length_preservation, CorpusMetrics, DistinctnessReport,
    DocMetrics, ExternalScorer, NgramScorer, PplScorer, DEFAULT_CHUNK,
};
use crate::model::{CacheKey, CorpusRecord, EntityGroup, Mode, PiiSpan, SurrogateDecision};
use crate::ner::{run_experiment, stratified_split, NerConfig, NerResults, SubstitutedDoc};
use crate::prompting::{analyze_regurgitation, DemoStrategy, PoolSet, RegurgitationReport};
use crate::text::CharIndex;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    /// `default`, `en`, or `tag=weight,...`.
    pub mix: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { n: 200, seed: 42, mix: "default".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScorerConfig {
    None,
    /// Character 5-gram model over the corpus's non-PII text.
    #[default]
    Ngram,
    External(AdapterConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Corpus file; a synthetic corpus is generated when absent.
    pub corpus: Option<PathBuf>,
    pub synth: SynthConfig,
    pub modes: Vec<Mode>,
    /// Keep only the first `n` documents.
    pub n: Option<usize>,
    pub detector: DetectorKind,
    pub external_detector: Option<AdapterConfig>,
    pub backend: BackendConfig,
    pub fake_stream: FakeStream,
    pub demo_strategy: DemoStrategy,
    /// Demonstration pool file overriding the built-in pools.
    pub pools: Option<PathBuf>,
    pub placeholder_prefix: String,
    pub scorer: ScorerConfig,
    pub ppl_chunk: usize,
    pub output: PathBuf,
    pub run_id: String,
    /// Worker threads for the parallel stages; all cores when absent.
    pub threads: Option<usize>,
    /// Cache file loaded before and saved after the run.
    pub cache_file: Option<PathBuf>,
    pub ner: NerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            synth: SynthConfig::default(),
            modes: Mode::ALL.to_vec(),
            n: None,
            detector: DetectorKind::Oracle,
            external_detector: None,
            backend: BackendConfig::default(),
            fake_stream: FakeStream::PerDocument,
            demo_strategy: DemoStrategy::RotatingLocale,
            pools: None,
            placeholder_prefix: String::new(),
            scorer: ScorerConfig::Ngram,
            ppl_chunk: DEFAULT_CHUNK,
            output: PathBuf::from("results"),
            run_id: "run".into(),
            threads: None,
            cache_file: None,
            ner: NerConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::InvalidInput("at least one mode is required".into()));
        }
        if self.n == Some(0) {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.run_id.is_empty() || self.run_id.contains(['/', '\\']) {
            return Err(Error::InvalidInput(format!("bad run id `{}`", self.run_id)));
        }
        if self.ppl_chunk == 0 {
            return Err(Error::InvalidInput("ppl chunk must be positive".into()));
        }
        Ok(())
    }

    /// Points the synthetic corpus at the NER experiment's locales, equally
    /// weighted, with exactly `train_n + test_n` documents.
    pub fn synth_for_ner(&mut self) {
        if self.ner.locales.is_empty() {
            return;
        }
        self.synth.mix = self.ner.locales.iter().map(|l| format!("{l}=1")).collect::<Vec<_>>().join(",");
        self.synth.n = self.ner.train_n + self.ner.test_n;
    }

    pub fn run_dir(&self) -> PathBuf {
        self.output.join(&self.run_id)
    }

    /// The configured corpus, truncated to `n`.
    pub fn load_records(&self) -> Result<Vec<CorpusRecord>> {
        let mut records = match &self.corpus {
            Some(path) => load_corpus(path)?,
            None => {
                let mix: LocaleMix = self.synth.mix.parse().map_err(Error::InvalidInput)?;
                synth_corpus(self.synth.n, self.synth.seed, &mix)
            }
        };
        if let Some(n) = self.n {
            records.truncate(n);
        }
        Ok(records)
    }
}

/// One entity's decision within a document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDecision {
    pub canonical: String,
    pub label: crate::model::Label,
    pub members: Vec<usize>,
    pub decision: SurrogateDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocResult {
    pub id: String,
    pub mode: Mode,
    pub output: String,
    pub spans: Vec<PiiSpan>,
    pub decisions: Vec<GroupDecision>,
    pub metrics: DocMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DocResult {
    /// Surrogate per span, in span order.
    pub fn span_surrogates(&self) -> Vec<String> {
        let mut out = vec![String::new(); self.spans.len()];
        for g in &self.decisions {
            for &m in &g.members {
                out[m] = g.decision.surrogate.clone();
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct StageTimings {
    pub detect_ms: f64,
    pub surrogate_ms: f64,
    pub splice_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTiming {
    pub id: String,
    pub mode: Mode,
    #[serde(flatten)]
    pub stages: StageTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub metrics: CorpusMetrics,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub run_id: String,
    pub ppl_scorer: Option<String>,
    pub documents: Vec<DocResult>,
    pub aggregates: Vec<ModeSummary>,
    pub cache: CacheCounters,
    pub distinctness: DistinctnessReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regurgitation: Option<RegurgitationReport>,
}

impl RunResults {
    pub fn aggregate(&self, mode: Mode) -> Option<&CorpusMetrics> {
        self.aggregates.iter().find(|a| a.mode == mode).map(|a| &a.metrics)
    }

    pub fn docs(&self, mode: Mode) -> impl Iterator<Item = &DocResult> {
        self.documents.iter().filter(move |d| d.mode == mode)
    }
}

/// Wall-clock time per stage, kept apart from the deterministic results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunTimings {
    pub documents: Vec<DocTiming>,
    pub total_ms: f64,
}

impl RunTimings {
    /// Mean per-document latency for `mode` (detect + surrogate + splice).
    pub fn mean_latency_ms(&self, mode: Mode) -> Option<f64> {
        let v: Vec<f64> = self
            .documents
            .iter()
            .filter(|d| d.mode == mode)
            .map(|d| d.stages.detect_ms + d.stages.surrogate_ms + d.stages.splice_ms)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Non-PII stretches of the corpus: the text with ground-truth
/// occurrences cut out.
pub fn non_pii_segments(records: &[CorpusRecord]) -> Vec<String> {
    let mut out = Vec::new();
    for r in records {
        let index = CharIndex::new(&r.text);
        let mut cursor = 0;
        for s in detect_oracle(r) {
            if s.start > cursor {
                out.push(index.slice(&r.text, cursor, s.start).to_string());
            }
            cursor = s.end;
        }
        if cursor < index.len() {
            out.push(index.slice(&r.text, cursor, index.len()).to_string());
        }
    }
    out
}

fn build_scorer(config: &RunConfig, records: &[CorpusRecord]) -> Result<Option<Box<dyn PplScorer>>> {
    Ok(match &config.scorer {
        ScorerConfig::None => None,
        ScorerConfig::Ngram => {
            let segments = non_pii_segments(records);
            Some(Box::new(NgramScorer::train(segments.iter().map(String::as_str), 5, config.ppl_chunk)))
        }
        ScorerConfig::External(adapter) => Some(Box::new(ExternalScorer::new(adapter)?)),
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

struct Detected {
    spans: Vec<PiiSpan>,
    groups: Vec<EntityGroup>,
    error: Option<String>,
    detect_ms: f64,
}

/// Runs everything the configuration asks for. Only a systemic backend
/// failure aborts; per-document problems are recorded on the document.
pub fn run_corpus(config: &RunConfig) -> Result<(RunResults, RunTimings)> {
    config.validate()?;
    let records = config.load_records()?;
    run_records(config, &records)
}

pub fn run_records(config: &RunConfig, records: &[CorpusRecord]) -> Result<(RunResults, RunTimings)> {
    config.validate()?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = config.threads {
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::InvalidInput(e.to_string()))?
    };
    pool.install(|| run_inner(config, records))
}

fn run_inner(config: &RunConfig, records: &[CorpusRecord]) -> Result<(RunResults, RunTimings)> {
    let started = Instant::now();
    let pools = match &config.pools {
        Some(p) => PoolSet::load(p)?,
        None => PoolSet::builtin(),
    };
    let detector = match config.detector {
        DetectorKind::Oracle => Detector::Oracle,
        DetectorKind::Rules => Detector::Rules,
        DetectorKind::External => {
            let adapter = config
                .external_detector
                .as_ref()
                .ok_or_else(|| Error::DetectorUnavailable("no external detector command configured".into()))?;
            Detector::External(ExternalDetector::new(adapter)?)
        }
    };
    let backend: Option<std::sync::Arc<dyn SlmBackend>> =
        if config.modes.contains(&Mode::Hybrid) { Some(config.backend.build()?) } else { None };
    let health = BackendHealth::new(config.backend.failure_threshold);
    let cache = match &config.cache_file {
        Some(p) if p.exists() => SurrogateCache::load(p)?,
        _ => SurrogateCache::new(),
    };
    let scorer = build_scorer(config, records)?;
    let proposer = Proposer {
        pools: &pools,
        backend: backend.as_deref(),
        strategy: config.demo_strategy,
        health: &health,
        placeholder_prefix: &config.placeholder_prefix,
    };

    let detected: Vec<Detected> = records
        .par_iter()
        .map(|r| {
            let t = Instant::now();
            let result = detector.detect(r).and_then(|spans| {
                let groups = resolve_entities(&spans)?;
                Ok((spans, groups))
            });
            let detect_ms = ms(t);
            match result {
                Ok((spans, groups)) => Detected { spans, groups, error: None, detect_ms },
                Err(e) => {
                    warn!("{}: detection failed: {e}", r.id);
                    Detected { spans: Vec::new(), groups: Vec::new(), error: Some(e.to_string()), detect_ms }
                }
            }
        })
        .collect();

    let mut documents = Vec::with_capacity(records.len() * config.modes.len());
    let mut timings = Vec::with_capacity(documents.capacity());
    for &mode in &config.modes {
        info!("mode {mode}: {} documents", records.len());
        // dispatch runs in document order so fake streams and cache fills
        // are reproducible
        let mut dispatched = Vec::with_capacity(records.len());
        for (r, det) in records.iter().zip(&detected) {
            let t = Instant::now();
            let mut state = FakeGenState::for_document(&r.id, config.fake_stream);
            let mut decisions = Vec::with_capacity(det.groups.len());
            let mut error = det.error.clone();
            for g in &det.groups {
                let key = CacheKey {
                    mode,
                    family: proposer.family(g.label, mode),
                    canonical: g.canonical.clone(),
                    label: g.label,
                };
                let surface = &det.spans[g.members[0]].surface;
                match cache.get_or_propose(&key, || proposer.dispatch(g.label, surface, mode, &mut state)) {
                    Ok(decision) => decisions.push(GroupDecision {
                        canonical: g.canonical.clone(),
                        label: g.label,
                        members: g.members.clone(),
                        decision,
                    }),
                    Err(e @ Error::BackendUnhealthy { .. }) => return Err(e),
                    Err(e) => {
                        warn!("{}: {mode} dispatch failed: {e}", r.id);
                        error = Some(e.to_string());
                        break;
                    }
                }
            }
            if error.is_some() && det.error.is_none() {
                decisions.clear();
            }
            dispatched.push((decisions, error, ms(t)));
        }

        let finished: Vec<(DocResult, DocTiming)> = records
            .par_iter()
            .zip(detected.par_iter())
            .zip(dispatched.into_par_iter())
            .map(|((r, det), (decisions, error, surrogate_ms))| {
                let t = Instant::now();
                let mut doc = DocResult {
                    id: r.id.clone(),
                    mode,
                    output: r.text.clone(),
                    spans: det.spans.clone(),
                    decisions,
                    metrics: DocMetrics::default(),
                    error,
                };
                if doc.error.is_some() {
                    // nothing was substituted; the output is the input
                    doc.spans.clear();
                    doc.decisions.clear();
                } else {
                    let surrogates = doc.span_surrogates();
                    let pairs: Vec<(PiiSpan, String)> = doc.spans.iter().cloned().zip(surrogates).collect();
                    match splice_with_offsets(&r.text, &pairs) {
                        Ok((out, _)) => doc.output = out,
                        Err(e) => {
                            warn!("{}: splice failed: {e}", r.id);
                            doc.error = Some(e.to_string());
                        }
                    }
                }
                let splice_ms = ms(t);
                let gt: Vec<&str> = r.gt_values().map(|(_, v)| v).collect();
                let consistency = consistency_rate(&det.groups, &doc.span_surrogates(), &doc.output);
                let has_groups = doc.error.is_none();
                doc.metrics = DocMetrics {
                    leak: leak_rate(&doc.output, &gt),
                    consistency: if has_groups { consistency.rate } else { None },
                    consistency_discrepancy: has_groups && consistency.discrepancy,
                    length_pres: length_preservation(&r.text, &doc.output),
                    ppl: scorer.as_ref().and_then(|s| s.perplexity(&doc.output)),
                };
                let timing = DocTiming {
                    id: r.id.clone(),
                    mode,
                    stages: StageTimings { detect_ms: det.detect_ms, surrogate_ms, splice_ms },
                };
                (doc, timing)
            })
            .collect();
        for (d, t) in finished {
            documents.push(d);
            timings.push(t);
        }
    }

    let aggregates = config
        .modes
        .iter()
        .map(|&mode| {
            let docs: Vec<&DocResult> = documents.iter().filter(|d| d.mode == mode).collect();
            let metrics: Vec<DocMetrics> = docs.iter().map(|d| d.metrics).collect();
            ModeSummary {
                mode,
                metrics: aggregate(&metrics),
                errors: docs.iter().filter(|d| d.error.is_some()).count(),
            }
        })
        .collect();

    let distinct = distinctness(documents.iter().flat_map(|d| {
        d.decisions
            .iter()
            .flat_map(move |g| g.members.iter().map(move |_| (g.label, d.mode, g.decision.surrogate.as_str())))
    }));

    let regurgitation = (config.modes.contains(&Mode::Hybrid) && backend.is_some()).then(|| {
        let slm: Vec<SurrogateDecision> =
            cache.snapshot().into_iter().filter(|(k, _)| k.mode == Mode::Hybrid).map(|(_, d)| d).collect();
        analyze_regurgitation(&slm, &pools)
    });

    if let Some(p) = &config.cache_file {
        cache.save(p)?;
    }

    let results = RunResults {
        run_id: config.run_id.clone(),
        ppl_scorer: scorer.as_ref().map(|s| s.id().to_string()),
        documents,
        aggregates,
        cache: cache.counters(),
        distinctness: distinct,
        regurgitation,
    };
    Ok((results, RunTimings { documents: timings, total_ms: ms(started) }))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut raw = serde_json::to_string_pretty(value)?;
    raw.push('\n');
    fs::write(path, raw).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&raw)?)
}

pub const RESULTS_FILE: &str = "results.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const REGURGITATION_FILE: &str = "regurgitation.json";
pub const TIMINGS_FILE: &str = "timings.json";
pub const NER_FILE: &str = "ner.json";

#[derive(Serialize)]
struct MetricsFile<'a> {
    aggregates: &'a [ModeSummary],
    cache: CacheCounters,
    distinctness: &'a DistinctnessReport,
}

/// Writes the structured files and text reports under `dir`.
pub fn persist_run(dir: &Path, results: &RunResults, timings: &RunTimings) -> Result<()> {
    use crate::report::{format_distinctness, format_primary, format_regurgitation};
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(RESULTS_FILE), results)?;
    write_json(
        &dir.join(METRICS_FILE),
        &MetricsFile { aggregates: &results.aggregates, cache: results.cache, distinctness: &results.distinctness },
    )?;
    write_json(&dir.join(TIMINGS_FILE), timings)?;
    write_text(&dir.join("primary.txt"), &format_primary(results, Some(timings)))?;
    write_text(&dir.join("distinctness.txt"), &format_distinctness(&results.distinctness))?;
    if let Some(r) = &results.regurgitation {
        write_json(&dir.join(REGURGITATION_FILE), r)?;
        write_text(&dir.join("regurgitation.txt"), &format_regurgitation(r))?;
    }
    Ok(())
}

pub fn load_run(dir: &Path) -> Result<(RunResults, Option<RunTimings>)> {
    let results = read_json(&dir.join(RESULTS_FILE))?;
    let timings_path = dir.join(TIMINGS_FILE);
    let timings = if timings_path.exists() { Some(read_json(&timings_path)?) } else { None };
    Ok((results, timings))
}

pub fn persist_ner(dir: &Path, results: &NerResults) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(NER_FILE), results)?;
    write_text(&dir.join("ner.txt"), &crate::ner::format_ner_table(results))
}

pub fn load_ner(dir: &Path) -> Result<NerResults> {
    read_json(&dir.join(NER_FILE))
}

/// The NER experiment: split, substitute the training half in every
/// configured mode, train and score on the original test half.
pub fn run_ner(config: &RunConfig) -> Result<NerResults> {
    config.validate()?;
    let mut records = config.load_records()?;
    if !config.ner.locales.is_empty() {
        records.retain(|r| config.ner.locales.contains(&r.locale));
    }
    let (train, test) = stratified_split(&records, config.ner.train_n, config.ner.test_n, config.ner.split_seed)?;
    let (results, _) = run_records(config, &train)?;
    let variants: Vec<(String, Vec<SubstitutedDoc>)> = config
        .modes
        .iter()
        .map(|&mode| {
            let docs = results
                .docs(mode)
                .filter(|d| d.error.is_none())
                .map(|d| SubstitutedDoc {
                    id: d.id.clone(),
                    text: d.output.clone(),
                    surrogates: d.decisions.iter().map(|g| g.decision.surrogate.clone()).collect(),
                })
                .collect();
            (mode_row_name(mode, config), docs)
        })
        .collect();
    run_experiment(&train, &test, &variants, &config.ner)
}

/// Row label of a mode in the NER table; hybrid carries the backend name.
pub fn mode_row_name(mode: Mode, config: &RunConfig) -> String {
    match mode {
        Mode::Hybrid => format!("hybrid-{}", config.backend.name),
        m => m.name().to_string(),
    }
}

/// Per-mode output texts keyed by document id, for callers that compare
/// modes side by side.
pub fn outputs_by_mode(results: &RunResults) -> BTreeMap<Mode, BTreeMap<&str, &str>> {
    let mut out: BTreeMap<Mode, BTreeMap<&str, &str>> = BTreeMap::new();
    for d in &results.documents {
        out.entry(d.mode).or_default().insert(d.id.as_str(), d.output.as_str());
    }
    out
}
