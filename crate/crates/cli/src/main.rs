use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::de::DeserializeOwned;

use surrogate_core::adapter::AdapterConfig;
use surrogate_core::corpus::{save_corpus, synth_corpus, LocaleMix};
use surrogate_core::detect::DetectorKind;
use surrogate_core::generation::{BackendConfig, FakeStream};
use surrogate_core::ner::{format_ner_table, MatchRule};
use surrogate_core::pipeline::{
    load_ner, load_run, persist_ner, persist_run, run_corpus, run_ner, RunConfig, ScorerConfig,
};
use surrogate_core::prompting::DemoStrategy;
use surrogate_core::report::{format_distinctness, format_primary, format_regurgitation, ReportKind};
use surrogate_core::Mode;

const ENV_CORPUS: &str = "SURROGATE_CORPUS";
const ENV_OUTPUT: &str = "SURROGATE_OUTPUT";

#[derive(Parser)]
#[command(name = "surrogate", version, about = "Consistent, locale-aware PII substitution and its evaluation")]
struct Cli {
    /// TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline over a corpus and print the primary metrics.
    Run(RunArgs),
    /// Write a synthetic corpus.
    Synth(SynthArgs),
    /// Train and evaluate the span tagger on original and substituted text.
    Ner(NerArgs),
    /// Run the pipeline and print surrogate distinctness per label and mode.
    Distinct(RunArgs),
    /// Run the pipeline and print the demonstration-copy analysis.
    Regurg(RunArgs),
    /// Print a report from a persisted run.
    Report(ReportArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Corpus JSON file; a synthetic corpus is generated when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    run_id: Option<String>,
    /// Process only the first N documents.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated modes: redact, faker, hybrid.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<Mode>>,
    /// oracle, rules or external.
    #[arg(long, value_parser = parse_serde::<DetectorKind>)]
    detector: Option<DetectorKind>,
    /// Command template of the external detector.
    #[arg(long)]
    detector_cmd: Option<String>,
    /// mock-pool, mock-echo-demo or cmd.
    #[arg(long)]
    slm_backend: Option<String>,
    /// Command template for the `cmd` backend.
    #[arg(long)]
    slm_cmd: Option<String>,
    /// rotating_locale or fixed_three.
    #[arg(long)]
    demo_strategy: Option<DemoStrategy>,
    /// per_document, independent or fixed.
    #[arg(long)]
    fake_stream: Option<FakeStream>,
    /// JSON demonstration pools replacing the built-in ones.
    #[arg(long)]
    pools: Option<PathBuf>,
    /// ngram, none, or an external scorer command template.
    #[arg(long)]
    scorer: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    cache_file: Option<PathBuf>,
    /// Synthetic corpus size when no corpus file is given.
    #[arg(long)]
    synth_n: Option<usize>,
    #[arg(long)]
    synth_seed: Option<u64>,
    /// default, en, or tag=weight,...
    #[arg(long)]
    synth_mix: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "default")]
    mix: String,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NerArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    train_n: Option<usize>,
    #[arg(long)]
    test_n: Option<usize>,
    /// Comma-separated training seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    split_seed: Option<u64>,
    /// Comma-separated locale tags kept for the experiment; `all` keeps every locale.
    #[arg(long, value_delimiter = ',')]
    locales: Option<Vec<String>>,
    /// Span matching rule: overlap or exact.
    #[arg(long, value_parser = parse_serde::<MatchRule>)]
    match_rule: Option<MatchRule>,
}

#[derive(Args)]
struct ReportArgs {
    /// primary, distinctness, regurgitation or ner.
    #[arg(long, default_value = "primary")]
    kind: ReportKind,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    run_id: Option<String>,
}

/// Parses a value through its serde name, for enums without `FromStr`.
fn parse_serde<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// Writes to stdout; a reader closing the pipe early is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let mut config = match path {
        Some(p) => {
            let raw = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&raw).with_context(|| format!("parsing {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(corpus) = std::env::var_os(ENV_CORPUS) {
        config.corpus = Some(corpus.into());
    }
    if let Some(output) = std::env::var_os(ENV_OUTPUT) {
        config.output = output.into();
    }
    Ok(config)
}

impl RunArgs {
    fn apply(self, c: &mut RunConfig) -> Result<()> {
        if let Some(v) = self.corpus {
            c.corpus = Some(v);
        }
        if let Some(v) = self.output {
            c.output = v;
        }
        if let Some(v) = self.run_id {
            c.run_id = v;
        }
        if self.n.is_some() {
            c.n = self.n;
        }
        if let Some(v) = self.modes {
            c.modes = v;
        }
        if let Some(v) = self.detector {
            c.detector = v;
        }
        if let Some(cmd) = self.detector_cmd {
            c.external_detector = Some(AdapterConfig::new(cmd));
            if self.detector.is_none() {
                c.detector = DetectorKind::External;
            }
        }
        if let Some(name) = self.slm_backend {
            let threshold = c.backend.failure_threshold;
            let command = c.backend.command.take();
            c.backend = BackendConfig { command, failure_threshold: threshold, ..BackendConfig::named(name) };
        }
        if let Some(cmd) = self.slm_cmd {
            c.backend.command = Some(AdapterConfig::new(cmd));
        }
        if let Some(v) = self.demo_strategy {
            c.demo_strategy = v;
        }
        if let Some(v) = self.fake_stream {
            c.fake_stream = v;
        }
        if let Some(v) = self.pools {
            c.pools = Some(v);
        }
        if let Some(v) = self.scorer {
            c.scorer = match v.as_str() {
                "ngram" => ScorerConfig::Ngram,
                "none" => ScorerConfig::None,
                cmd => ScorerConfig::External(AdapterConfig::new(cmd)),
            };
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if self.cache_file.is_some() {
            c.cache_file = self.cache_file;
        }
        if let Some(v) = self.synth_n {
            c.synth.n = v;
        }
        if let Some(v) = self.synth_seed {
            c.synth.seed = v;
        }
        if let Some(v) = self.synth_mix {
            v.parse::<LocaleMix>().map_err(anyhow::Error::msg)?;
            c.synth.mix = v;
        }
        c.validate()?;
        Ok(())
    }
}

fn run_and_persist(config: &RunConfig) -> Result<(surrogate_core::RunResults, surrogate_core::pipeline::RunTimings)> {
    let (results, timings) = run_corpus(config)?;
    let dir = config.run_dir();
    persist_run(&dir, &results, &timings)?;
    info!("results written to {}", dir.display());
    Ok((results, timings))
}

fn execute(cli: Cli) -> Result<()> {
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Run(args) => {
            args.apply(&mut config)?;
            let (results, timings) = run_and_persist(&config)?;
            emit(&format_primary(&results, Some(&timings)))?;
        }
        Command::Distinct(args) => {
            args.apply(&mut config)?;
            let (results, _) = run_and_persist(&config)?;
            emit(&format_distinctness(&results.distinctness))?;
        }
        Command::Regurg(args) => {
            let default_modes = args.modes.is_none();
            args.apply(&mut config)?;
            if default_modes && cli.config.is_none() {
                config.modes = vec![Mode::Hybrid];
            }
            if !config.modes.contains(&Mode::Hybrid) {
                bail!("the regurgitation analysis needs the hybrid mode");
            }
            let (results, _) = run_and_persist(&config)?;
            let report = results.regurgitation.context("no SLM decisions were made")?;
            emit(&format_regurgitation(&report))?;
        }
        Command::Synth(args) => {
            let mix: LocaleMix = args.mix.parse().map_err(anyhow::Error::msg)?;
            if args.n == 0 {
                bail!("n must be at least 1");
            }
            let records = synth_corpus(args.n, args.seed, &mix);
            match args.out {
                Some(path) => {
                    save_corpus(&path, &records)?;
                    info!("{} records written to {}", records.len(), path.display());
                }
                None => emit(&format!("{}\n", serde_json::to_string_pretty(&records)?))?,
            }
        }
        Command::Ner(args) => {
            let ner_modes = args.run.modes.is_none();
            let synth_defaults = args.run.synth_mix.is_none() && args.run.synth_n.is_none();
            args.run.apply(&mut config)?;
            let ner = &mut config.ner;
            if let Some(v) = args.train_n {
                ner.train_n = v;
            }
            if let Some(v) = args.test_n {
                ner.test_n = v;
            }
            if let Some(v) = args.seeds {
                ner.seeds = v;
            }
            if let Some(v) = args.iterations {
                ner.iterations = v;
            }
            if let Some(v) = args.split_seed {
                ner.split_seed = v;
            }
            if let Some(v) = args.locales {
                ner.locales = if v.iter().any(|l| l == "all") { Vec::new() } else { v };
            }
            if let Some(v) = args.match_rule {
                ner.match_rule = v;
            }
            if cli.config.is_none() {
                if ner_modes {
                    config.modes = Mode::ALL.to_vec();
                }
                // a synthetic corpus drawn from the experiment's locales, just large enough
                if synth_defaults && config.corpus.is_none() {
                    config.synth_for_ner();
                }
            }
            let results = run_ner(&config)?;
            persist_ner(&config.run_dir(), &results)?;
            emit(&format_ner_table(&results))?;
        }
        Command::Report(args) => {
            if let Some(v) = args.output {
                config.output = v;
            }
            if let Some(v) = args.run_id {
                config.run_id = v;
            }
            let dir = config.run_dir();
            match args.kind {
                ReportKind::Ner => emit(&format_ner_table(&load_ner(&dir)?))?,
                kind => {
                    let (results, timings) = load_run(&dir)?;
                    match kind {
                        ReportKind::Primary => emit(&format_primary(&results, timings.as_ref()))?,
                        ReportKind::Distinctness => emit(&format_distinctness(&results.distinctness))?,
                        ReportKind::Regurgitation => match &results.regurgitation {
                            Some(r) => emit(&format_regurgitation(r))?,
                            None => bail!("run `{}` has no regurgitation analysis", config.run_id),
                        },
                        ReportKind::Ner => unreachable!(),
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
