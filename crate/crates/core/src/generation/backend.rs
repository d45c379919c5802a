//! SLM backends: two deterministic mocks and a subprocess command.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adapter::{AdapterConfig, AdapterError, CommandAdapter};
use crate::error::{Error, Result};
use crate::model::canonicalize;
use crate::prompting::{input_seed, PromptSpec, SplitMix64};

/// Single-turn local runner invocation; the model path is relative to the
/// working directory.
pub const DEFAULT_SLM_COMMAND: &str =
    "llama-cli -m models/Bonsai-1.7B-Q1_0.gguf --single-turn --temp 0 -n 32 -no-cnv -p {input}";

pub const MOCK_POOL: &str = "mock-pool";
pub const MOCK_ECHO_DEMO: &str = "mock-echo-demo";

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error("{0}")]
    Failed(String),
}

pub trait SlmBackend: Send + Sync {
    /// Identifier used as the cache-key family.
    fn id(&self) -> &str;
    /// Raw completion for a rendered prompt.
    fn complete(&self, prompt: &PromptSpec) -> Result<String, BackendError>;
}

/// Returns one of the prompt's demo strings, chosen from the input's hash,
/// never one canonically equal to the input. Output carries a leading space
/// and a runaway `Real:` line, the way a completion model tends to.
#[derive(Debug, Default, Clone, Copy)]
pub struct MockPool;

impl SlmBackend for MockPool {
    fn id(&self) -> &str {
        MOCK_POOL
    }

    fn complete(&self, prompt: &PromptSpec) -> Result<String, BackendError> {
        let input = canonicalize(&prompt.input).unwrap_or_default();
        let mut choices: Vec<&str> = Vec::new();
        for demo in &prompt.demos {
            for s in [demo.fake.as_str(), demo.real.as_str()] {
                if canonicalize(s).ok().as_deref() != Some(input.as_str()) && !choices.contains(&s) {
                    choices.push(s);
                }
            }
        }
        if choices.is_empty() {
            return Err(BackendError::Failed("no usable demo string".into()));
        }
        let mut rng = SplitMix64::new(input_seed(&prompt.input) ^ 0x6D6F_636B);
        let choice = choices[rng.below(choices.len())];
        Ok(format!(" {choice}\nReal:"))
    }
}

/// Always answers with the first demo's fake string.
#[derive(Debug, Default, Clone, Copy)]
pub struct MockEchoDemo;

impl SlmBackend for MockEchoDemo {
    fn id(&self) -> &str {
        MOCK_ECHO_DEMO
    }

    fn complete(&self, prompt: &PromptSpec) -> Result<String, BackendError> {
        prompt
            .demos
            .first()
            .map(|d| format!(" {}", d.fake))
            .ok_or_else(|| BackendError::Failed("prompt has no demos".into()))
    }
}

/// Completion produced by an external command; the whole rendered prompt is
/// the payload.
pub struct CommandBackend {
    id: String,
    adapter: CommandAdapter,
}

impl CommandBackend {
    pub fn new(id: impl Into<String>, config: &AdapterConfig) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidInput("backend id must be non-empty".into()));
        }
        let adapter = CommandAdapter::new(config).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(Self { id, adapter })
    }
}

impl SlmBackend for CommandBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, prompt: &PromptSpec) -> Result<String, BackendError> {
        Ok(self.adapter.run(&prompt.rendered)?)
    }
}

/// Backend selection as it appears in run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendConfig {
    /// `mock-pool`, `mock-echo-demo` or `cmd`.
    pub name: String,
    /// Command settings for `cmd`; defaults to [`DEFAULT_SLM_COMMAND`].
    #[serde(default)]
    pub command: Option<AdapterConfig>,
    /// Consecutive failures tolerated before the run aborts.
    #[serde(default = "default_failure_threshold")]
    pub failure_threshold: usize,
}

fn default_failure_threshold() -> usize {
    5
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self { name: MOCK_POOL.into(), command: None, failure_threshold: default_failure_threshold() }
    }
}

impl BackendConfig {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn build(&self) -> Result<Arc<dyn SlmBackend>> {
        match self.name.as_str() {
            MOCK_POOL => Ok(Arc::new(MockPool)),
            MOCK_ECHO_DEMO => Ok(Arc::new(MockEchoDemo)),
            "cmd" => {
                let config = self.command.clone().unwrap_or_else(|| AdapterConfig::new(DEFAULT_SLM_COMMAND));
                let program = config.command.split_whitespace().next().unwrap_or("cmd").to_string();
                Ok(Arc::new(CommandBackend::new(format!("cmd:{program}"), &config)?))
            }
            other => Err(Error::UnknownBackend(other.to_string())),
        }
    }
}

/// Counts consecutive backend failures across a run.
#[derive(Debug)]
pub struct BackendHealth {
    consecutive: AtomicUsize,
    total: AtomicUsize,
    threshold: usize,
}

impl BackendHealth {
    pub fn new(threshold: usize) -> Self {
        Self { consecutive: AtomicUsize::new(0), total: AtomicUsize::new(0), threshold }
    }

    pub fn record_success(&self) {
        self.consecutive.store(0, Ordering::SeqCst);
    }

    /// Records a failure; errors once the consecutive count exceeds the
    /// threshold.
    pub fn record_failure(&self, backend: &str) -> Result<()> {
        self.total.fetch_add(1, Ordering::SeqCst);
        let n = self.consecutive.fetch_add(1, Ordering::SeqCst) + 1;
        if n > self.threshold {
            return Err(Error::BackendUnhealthy { backend: backend.to_string(), failures: n });
        }
        Ok(())
    }

    pub fn total_failures(&self) -> usize {
        self.total.load(Ordering::SeqCst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompting::{build_prompt, validate_response, Demo};

    fn demos() -> Vec<Demo> {
        [("王芳", "李伟"), ("张敏", "刘洋"), ("陈静", "黄磊")]
            .iter()
            .enumerate()
            .map(|(i, (r, f))| Demo { id: format!("t#{i}"), real: r.to_string(), fake: f.to_string() })
            .collect()
    }

    #[test]
    fn mock_pool_is_deterministic_and_valid() {
        let prompt = build_prompt(&demos(), "杨娟").unwrap();
        let a = MockPool.complete(&prompt).unwrap();
        assert_eq!(a, MockPool.complete(&prompt).unwrap());
        let cleaned = validate_response(&a, "杨娟").unwrap();
        assert!(demos().iter().any(|d| d.fake == cleaned || d.real == cleaned));
    }

    #[test]
    fn mock_pool_never_returns_the_input() {
        let prompt = build_prompt(&demos(), "李伟").unwrap();
        let out = validate_response(&MockPool.complete(&prompt).unwrap(), "李伟").unwrap();
        assert_ne!(out, "李伟");
    }

    #[test]
    fn echo_demo_returns_first_fake() {
        let prompt = build_prompt(&demos(), "anything").unwrap();
        assert_eq!(validate_response(&MockEchoDemo.complete(&prompt).unwrap(), "anything").unwrap(), "李伟");
    }

    #[test]
    fn unknown_backend_name() {
        assert!(matches!(BackendConfig::named("gpt").build(), Err(Error::UnknownBackend(_))));
        assert_eq!(BackendConfig::named("cmd").build().unwrap().id(), "cmd:llama-cli");
    }

    #[test]
    fn health_threshold() {
        let h = BackendHealth::new(2);
        h.record_failure("b").unwrap();
        h.record_success();
        h.record_failure("b").unwrap();
        h.record_failure("b").unwrap();
        assert!(matches!(h.record_failure("b"), Err(Error::BackendUnhealthy { failures: 3, .. })));
        assert_eq!(h.total_failures(), 4);
    }

    #[cfg(unix)]
    #[test]
    fn command_backend_reads_stdout() {
        let b = CommandBackend::new("echo", &AdapterConfig::new("printf ' Chen Jing\\nReal: x'")).unwrap();
        let prompt = build_prompt(&demos(), "杨娟").unwrap();
        assert_eq!(validate_response(&b.complete(&prompt).unwrap(), "杨娟").unwrap(), "Chen Jing");
    }
}
