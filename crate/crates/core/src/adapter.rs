//! Subprocess adapter shared by the external detector, the SLM backend
//! and the external perplexity scorer.
//!
//! A command template is split with shell-word rules. When the template
//! contains the `{input}` placeholder the payload is substituted into that
//! argument; otherwise the payload is written to the child's stdin.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

pub const INPUT_PLACEHOLDER: &str = "{input}";

#[derive(Debug, thiserror::Error)]
pub enum AdapterError {
    #[error("invalid command template: {0}")]
    Template(String),
    #[error("failed to spawn `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("`{program}` exited with status {code:?}: {stderr}")]
    Exit { program: String, code: Option<i32>, stderr: String },
    #[error("`{program}` timed out after {timeout:?}")]
    Timeout { program: String, timeout: Duration },
    #[error("i/o with `{program}`: {source}")]
    Io {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("`{program}` wrote non UTF-8 output")]
    Utf8 { program: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Substitute the payload for `{input}`, falling back to stdin when the
    /// template has no placeholder.
    #[default]
    Auto,
    Stdin,
    Argument,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdapterConfig {
    pub command: String,
    #[serde(default)]
    pub input: InputMode,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default = "default_concurrency")]
    pub max_concurrency: usize,
}

fn default_timeout_secs() -> f64 {
    60.0
}

fn default_concurrency() -> usize {
    1
}

impl AdapterConfig {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            input: InputMode::Auto,
            timeout_secs: default_timeout_secs(),
            max_concurrency: default_concurrency(),
        }
    }
}

/// Counting semaphore bounding in-flight calls.
#[derive(Debug)]
struct Limiter {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Limiter {
    fn acquire(&self) -> LimiterGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        LimiterGuard(self)
    }
}

struct LimiterGuard<'a>(&'a Limiter);

impl Drop for LimiterGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug, Clone)]
pub struct CommandAdapter {
    argv: Vec<String>,
    use_stdin: bool,
    timeout: Duration,
    limiter: Arc<Limiter>,
}

impl CommandAdapter {
    pub fn new(config: &AdapterConfig) -> Result<Self, AdapterError> {
        let argv = shell_words::split(&config.command).map_err(|e| AdapterError::Template(e.to_string()))?;
        if argv.is_empty() {
            return Err(AdapterError::Template("empty command".into()));
        }
        let has_placeholder = argv.iter().any(|a| a.contains(INPUT_PLACEHOLDER));
        let use_stdin = match config.input {
            InputMode::Auto => !has_placeholder,
            InputMode::Stdin => true,
            InputMode::Argument if !has_placeholder => {
                return Err(AdapterError::Template(format!("argument mode needs a {INPUT_PLACEHOLDER} placeholder")))
            }
            InputMode::Argument => false,
        };
        if config.timeout_secs.is_nan() || config.timeout_secs <= 0.0 {
            return Err(AdapterError::Template("timeout must be positive".into()));
        }
        Ok(Self {
            argv,
            use_stdin,
            timeout: Duration::from_secs_f64(config.timeout_secs),
            limiter: Arc::new(Limiter { free: Mutex::new(config.max_concurrency.max(1)), cv: Condvar::new() }),
        })
    }

    pub fn program(&self) -> &str {
        &self.argv[0]
    }

    /// Runs the command once and returns its stdout.
    pub fn run(&self, payload: &str) -> Result<String, AdapterError> {
        let _slot = self.limiter.acquire();
        let program = self.argv[0].clone();
        let args: Vec<String> = self.argv[1..]
            .iter()
            .map(|a| if self.use_stdin { a.clone() } else { a.replace(INPUT_PLACEHOLDER, payload) })
            .collect();

        let mut child = Command::new(&program)
            .args(&args)
            .stdin(if self.use_stdin { Stdio::piped() } else { Stdio::null() })
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| AdapterError::Spawn { program: program.clone(), source })?;

        let writer = self.use_stdin.then(|| {
            let mut stdin = child.stdin.take().expect("stdin piped");
            let payload = payload.to_owned();
            // a child that exits without reading stdin yields EPIPE; ignore it
            thread::spawn(move || {
                let _ = stdin.write_all(payload.as_bytes());
            })
        });
        let mut stdout = child.stdout.take().expect("stdout piped");
        let mut stderr = child.stderr.take().expect("stderr piped");
        let out_reader = thread::spawn(move || {
            let mut buf = Vec::new();
            stdout.read_to_end(&mut buf).map(|_| buf)
        });
        let err_reader = thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stderr.read_to_end(&mut buf);
            buf
        });

        let status = match child.wait_timeout(self.timeout) {
            Ok(Some(status)) => status,
            Ok(None) => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(AdapterError::Timeout { program, timeout: self.timeout });
            }
            Err(source) => return Err(AdapterError::Io { program, source }),
        };
        if let Some(w) = writer {
            let _ = w.join();
        }
        let out = out_reader
            .join()
            .expect("stdout reader panicked")
            .map_err(|source| AdapterError::Io { program: program.clone(), source })?;
        let err = err_reader.join().expect("stderr reader panicked");
        if !status.success() {
            return Err(AdapterError::Exit {
                program,
                code: status.code(),
                stderr: String::from_utf8_lossy(&err).trim().to_string(),
            });
        }
        String::from_utf8(out).map_err(|_| AdapterError::Utf8 { program })
    }
}
