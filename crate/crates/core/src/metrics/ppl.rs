//! Perplexity scorers. The built-in one is a character n-gram model; an
//! external command can stand in for a neural scorer.

use std::collections::{HashMap, HashSet};

use log::warn;

use crate::adapter::{AdapterConfig, CommandAdapter};
use crate::error::{Error, Result};

pub const DEFAULT_CHUNK: usize = 1024;

pub trait PplScorer: Send + Sync {
    fn id(&self) -> &str;
    /// `None` when the text cannot be scored; never a made-up number.
    fn perplexity(&self, text: &str) -> Option<f64>;
}

const BOS: char = '\u{2}';

/// Character n-gram model with add-one smoothing.
#[derive(Debug, Clone)]
pub struct NgramScorer {
    order: usize,
    chunk: usize,
    grams: HashMap<String, u32>,
    contexts: HashMap<String, u32>,
    vocab: usize,
}

impl NgramScorer {
    pub fn train<'a>(segments: impl IntoIterator<Item = &'a str>, order: usize, chunk: usize) -> Self {
        assert!(order >= 1 && chunk >= 1);
        let mut grams = HashMap::new();
        let mut contexts = HashMap::new();
        let mut vocab = HashSet::new();
        for seg in segments {
            let chars = padded(seg, order);
            for w in chars.windows(order) {
                let ctx: String = w[..order - 1].iter().collect();
                let gram: String = w.iter().collect();
                *contexts.entry(ctx).or_insert(0) += 1;
                *grams.entry(gram).or_insert(0) += 1;
                vocab.insert(w[order - 1]);
            }
        }
        // one extra slot for unseen characters
        Self { order, chunk, grams, contexts, vocab: vocab.len() + 1 }
    }

    /// Mean negative log-likelihood per character of one chunk.
    fn chunk_nll(&self, chunk: &[char]) -> f64 {
        let text: String = chunk.iter().collect();
        let chars = padded(&text, self.order);
        let mut total = 0.0;
        let mut n = 0usize;
        for w in chars.windows(self.order) {
            let ctx: String = w[..self.order - 1].iter().collect();
            let gram: String = w.iter().collect();
            let c = *self.grams.get(&gram).unwrap_or(&0) as f64;
            let cc = *self.contexts.get(&ctx).unwrap_or(&0) as f64;
            total -= ((c + 1.0) / (cc + self.vocab as f64)).ln();
            n += 1;
        }
        total / n as f64
    }
}

fn padded(text: &str, order: usize) -> Vec<char> {
    std::iter::repeat_n(BOS, order - 1).chain(text.chars()).collect()
}

impl PplScorer for NgramScorer {
    fn id(&self) -> &str {
        "char-ngram"
    }

    /// exp of the mean per-chunk NLL; context restarts at each chunk.
    fn perplexity(&self, text: &str) -> Option<f64> {
        let chars: Vec<char> = text.chars().collect();
        if chars.is_empty() {
            return None;
        }
        let nlls: Vec<f64> = chars.chunks(self.chunk).map(|c| self.chunk_nll(c)).collect();
        Some((nlls.iter().sum::<f64>() / nlls.len() as f64).exp())
    }
}

/// Sends the text to a command and reads a single decimal back.
pub struct ExternalScorer {
    id: String,
    adapter: CommandAdapter,
}

impl ExternalScorer {
    pub fn new(config: &AdapterConfig) -> Result<Self> {
        let adapter = CommandAdapter::new(config).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(Self { id: format!("cmd:{}", adapter.program()), adapter })
    }
}

impl PplScorer for ExternalScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn perplexity(&self, text: &str) -> Option<f64> {
        if text.is_empty() {
            return None;
        }
        match self.adapter.run(text) {
            Ok(out) => match out.trim().parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => Some(v),
                _ => {
                    warn!("scorer {} returned `{}`, recording PPL as absent", self.id, out.trim());
                    None
                }
            },
            Err(e) => {
                warn!("scorer {} unavailable: {e}", self.id);
                None
            }
        }
    }
}
