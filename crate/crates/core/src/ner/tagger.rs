//! Averaged-perceptron BIO tagger with a single PII class.

use std::collections::HashMap;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::annotate::AnnotatedDoc;
use super::tokenize::{tokenize, Token};

pub const DEFAULT_ITERATIONS: usize = 30;

const O: usize = 0;
const B: usize = 1;
const I: usize = 2;
const TAGS: usize = 3;

fn shape(word: &str) -> String {
    let mut out = String::new();
    for c in word.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else if c.is_alphanumeric() {
            'c'
        } else {
            c
        };
        if !out.ends_with(s) {
            out.push(s);
        }
    }
    out
}

fn word_features(prefix: &str, token: Option<&Token>, out: &mut Vec<String>) {
    let Some(t) = token else {
        out.push(format!("{prefix}w=<edge>"));
        return;
    };
    let lower = t.text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let head: String = chars.iter().take(3).collect();
    let tail: String = chars[chars.len().saturating_sub(3)..].iter().collect();
    out.push(format!("{prefix}w={lower}"));
    out.push(format!("{prefix}s={}", shape(&t.text)));
    out.push(format!("{prefix}p3={head}"));
    out.push(format!("{prefix}x3={tail}"));
    if t.text.chars().any(char::is_numeric) {
        out.push(format!("{prefix}digit"));
    }
    if !t.text.chars().any(char::is_alphanumeric) {
        out.push(format!("{prefix}punct"));
    }
}

/// Static feature strings for token `i`.
fn token_features(tokens: &[Token], i: usize) -> Vec<String> {
    let mut out = vec!["bias".to_string()];
    word_features("", tokens.get(i), &mut out);
    word_features("-1:", i.checked_sub(1).and_then(|j| tokens.get(j)), &mut out);
    word_features("+1:", tokens.get(i + 1), &mut out);
    out
}

fn prev_tag_feature(tag: usize) -> String {
    format!("prev={tag}")
}

/// Gold BIO tags: a token overlapping a span is B when it is the first
/// such token of that span, I otherwise.
pub fn bio_tags(tokens: &[Token], spans: &[(usize, usize)]) -> Vec<usize> {
    let mut tags = vec![O; tokens.len()];
    let mut last_span = None;
    for (i, t) in tokens.iter().enumerate() {
        if let Some(k) = spans.iter().position(|&(s, e)| t.start < e && s < t.end) {
            tags[i] = if last_span == Some(k) { I } else { B };
            last_span = Some(k);
        } else {
            last_span = None;
        }
    }
    tags
}

/// Char spans from BIO tags; an I without an open span opens one.
pub fn decode_bio(tokens: &[Token], tags: &[usize]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    for (t, &tag) in tokens.iter().zip(tags) {
        match (tag, open.as_mut()) {
            (I, Some(span)) => span.1 = t.end,
            (B, _) | (I, None) => {
                spans.extend(open.take());
                open = Some((t.start, t.end));
            }
            _ => spans.extend(open.take()),
        }
    }
    spans.extend(open);
    spans
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    features: HashMap<String, u32>,
    weights: Vec<[f64; TAGS]>,
    pub seed: u64,
    pub iterations: usize,
}

struct Prepared {
    tokens: Vec<Token>,
    feats: Vec<Vec<u32>>,
    gold: Vec<usize>,
}

fn best(scores: [f64; TAGS]) -> usize {
    // ties resolve to O, then B
    let mut tag = O;
    for t in [B, I] {
        if scores[t] > scores[tag] {
            tag = t;
        }
    }
    tag
}

impl TaggerModel {
    pub fn weights(&self) -> &[[f64; TAGS]] {
        &self.weights
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    fn id(&self, f: &str) -> Option<u32> {
        self.features.get(f).copied()
    }

    fn score(weights: &[[f64; TAGS]], feats: &[u32], prev: Option<u32>) -> [f64; TAGS] {
        let mut s = [0.0; TAGS];
        for &f in feats.iter().chain(prev.iter()) {
            for (t, w) in weights[f as usize].iter().enumerate() {
                s[t] += w;
            }
        }
        s
    }

    fn greedy(&self, weights: &[[f64; TAGS]], feats: &[Vec<u32>], prev_ids: &[Option<u32>; TAGS]) -> Vec<usize> {
        let mut tags = Vec::with_capacity(feats.len());
        let mut prev = O;
        for f in feats {
            let tag = best(Self::score(weights, f, prev_ids[prev]));
            tags.push(tag);
            prev = tag;
        }
        tags
    }

    fn prev_ids(&self) -> [Option<u32>; TAGS] {
        [O, B, I].map(|t| self.id(&prev_tag_feature(t)))
    }

    pub fn predict_tokens(&self, tokens: &[Token]) -> Vec<usize> {
        let feats: Vec<Vec<u32>> =
            (0..tokens.len()).map(|i| token_features(tokens, i).iter().filter_map(|f| self.id(f)).collect()).collect();
        self.greedy(&self.weights, &feats, &self.prev_ids())
    }

    /// Predicted PII spans (char offsets).
    pub fn predict(&self, text: &str) -> Vec<(usize, usize)> {
        let tokens = tokenize(text);
        let tags = self.predict_tokens(&tokens);
        decode_bio(&tokens, &tags)
    }
}

/// Trains with per-epoch shuffling driven by `seed`.
pub fn train_tagger(docs: &[AnnotatedDoc], seed: u64, iterations: usize) -> TaggerModel {
    let mut model = TaggerModel { features: HashMap::new(), weights: Vec::new(), seed, iterations };
    let intern = |f: String, m: &mut TaggerModel| -> u32 {
        let next = m.features.len() as u32;
        *m.features.entry(f).or_insert(next)
    };
    for t in [O, B, I] {
        intern(prev_tag_feature(t), &mut model);
    }
    let mut prepared = Vec::with_capacity(docs.len());
    for doc in docs {
        let tokens = tokenize(&doc.text);
        let feats = (0..tokens.len())
            .map(|i| token_features(&tokens, i).into_iter().map(|f| intern(f, &mut model)).collect())
            .collect();
        let gold = bio_tags(&tokens, &doc.spans);
        prepared.push(Prepared { tokens, feats, gold });
    }
    let n = model.features.len();
    if !prepared.iter().any(|p| p.gold.iter().any(|&t| t != O)) {
        warn!("untrainable corpus: no positive spans in {} training documents", docs.len());
        model.weights = vec![[0.0; TAGS]; n];
        return model;
    }

    let prev_ids = model.prev_ids();
    let mut w = vec![[0.0f64; TAGS]; n];
    let mut totals = vec![[0.0f64; TAGS]; n];
    let mut stamps = vec![[0u64; TAGS]; n];
    let mut step: u64 = 0;
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut bump = |w: &mut [[f64; TAGS]], f: usize, t: usize, delta: f64, step: u64| {
        totals[f][t] += (step - stamps[f][t]) as f64 * w[f][t];
        stamps[f][t] = step;
        w[f][t] += delta;
    };

    for _ in 0..iterations {
        order.shuffle(&mut rng);
        for &d in &order {
            let p = &prepared[d];
            let mut prev = O;
            for (feats, &gold) in p.feats.iter().zip(&p.gold) {
                step += 1;
                let pf = prev_ids[prev];
                let guess = best(TaggerModel::score(&w, feats, pf));
                if guess != gold {
                    for &f in feats.iter().chain(pf.iter()) {
                        bump(&mut w, f as usize, gold, 1.0, step);
                        bump(&mut w, f as usize, guess, -1.0, step);
                    }
                }
                prev = guess;
            }
            debug_assert_eq!(p.tokens.len(), p.feats.len());
        }
    }
    let step = step.max(1);
    model.weights = (0..n)
        .map(|f| {
            let mut avg = [0.0; TAGS];
            for t in 0..TAGS {
                avg[t] = (totals[f][t] + (step - stamps[f][t]) as f64 * w[f][t]) / step as f64;
            }
            avg
        })
        .collect();
    model
}
