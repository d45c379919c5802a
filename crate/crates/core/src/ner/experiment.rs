use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::annotate::{annotate_original, annotate_substituted, AnnotatedDoc};
use super::eval::{eval_span_f1, MatchRule, Prf};
use super::tagger::{train_tagger, DEFAULT_ITERATIONS};
use crate::error::{Error, Result};
use crate::metrics::{mean, pstdev, stdev, welch, SdKind, Summary, WelchResult};
use crate::model::CorpusRecord;

pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NerConfig {
    #[serde(default = "default_train_n")]
    pub train_n: usize,
    #[serde(default = "default_test_n")]
    pub test_n: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub split_seed: u64,
    /// Locale tags kept for the experiment; empty keeps all.
    #[serde(default = "default_locales")]
    pub locales: Vec<String>,
    #[serde(default)]
    pub match_rule: MatchRule,
}

fn default_train_n() -> usize {
    160
}
fn default_test_n() -> usize {
    40
}
fn default_seeds() -> Vec<u64> {
    (1..=5).collect()
}
fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}
fn default_locales() -> Vec<String> {
    vec!["en_US".into(), "en_IN".into()]
}

impl Default for NerConfig {
    fn default() -> Self {
        Self {
            train_n: default_train_n(),
            test_n: default_test_n(),
            seeds: default_seeds(),
            iterations: default_iterations(),
            split_seed: 0,
            locales: default_locales(),
            match_rule: MatchRule::Overlap,
        }
    }
}

/// A training document after substitution, with the surrogates used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutedDoc {
    pub id: String,
    pub text: String,
    pub surrogates: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub pstdev: f64,
    pub stdev: f64,
}

impl Stat {
    fn of(xs: &[f64]) -> Self {
        Self { mean: mean(xs), pstdev: pstdev(xs), stdev: stdev(xs) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerRow {
    pub mode: String,
    pub train_docs: usize,
    pub train_spans: usize,
    pub annotation_gaps: usize,
    pub precision: Stat,
    pub recall: Stat,
    pub f1: Stat,
    pub delta_f1: Option<f64>,
    pub per_seed: Vec<Prf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelchComparison {
    pub a: String,
    pub b: String,
    pub population: Option<WelchResult>,
    pub sample: Option<WelchResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerResults {
    pub config: NerConfig,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub rows: Vec<NerRow>,
    pub comparisons: Vec<WelchComparison>,
}

impl NerResults {
    pub fn row(&self, mode: &str) -> Option<&NerRow> {
        self.rows.iter().find(|r| r.mode == mode)
    }

    pub fn comparison(&self, a: &str, b: &str) -> Option<&WelchComparison> {
        self.comparisons.iter().find(|c| c.a == a && c.b == b)
    }
}

/// Stratified-by-locale split. Each locale contributes to train and test
/// in proportion to its share (largest-remainder rounding).
pub fn stratified_split(
    corpus: &[CorpusRecord],
    train_n: usize,
    test_n: usize,
    seed: u64,
) -> Result<(Vec<CorpusRecord>, Vec<CorpusRecord>)> {
    if train_n + test_n > corpus.len() {
        return Err(Error::Experiment(format!(
            "train {train_n} + test {test_n} exceeds the {} available documents",
            corpus.len()
        )));
    }
    let mut groups: BTreeMap<&str, Vec<&CorpusRecord>> = BTreeMap::new();
    for r in corpus {
        groups.entry(r.locale.as_str()).or_default().push(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for g in groups.values_mut() {
        g.shuffle(&mut rng);
    }
    let sizes: Vec<usize> = groups.values().map(Vec::len).collect();
    let test_q = apportion(&sizes, test_n);
    let rest: Vec<usize> = sizes.iter().zip(&test_q).map(|(s, t)| s - t).collect();
    let train_q = apportion(&rest, train_n);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for ((g, t), tr) in groups.values().zip(test_q).zip(train_q) {
        test.extend(g[..t].iter().map(|r| (*r).clone()));
        train.extend(g[t..t + tr].iter().map(|r| (*r).clone()));
    }
    Ok((train, test))
}

/// Splits `total` in proportion to `sizes`, never exceeding a size.
fn apportion(sizes: &[usize], total: usize) -> Vec<usize> {
    let sum: usize = sizes.iter().sum();
    if sum == 0 {
        return vec![0; sizes.len()];
    }
    let mut q: Vec<usize> = sizes.iter().map(|s| s * total / sum).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = (sizes[a] * total) % sum;
        let rb = (sizes[b] * total) % sum;
        rb.cmp(&ra).then(a.cmp(&b))
    });
    let mut left = total - q.iter().sum::<usize>();
    while left > 0 {
        let before = left;
        for &i in &order {
            if left > 0 && q[i] < sizes[i] {
                q[i] += 1;
                left -= 1;
            }
        }
        if before == left {
            break;
        }
    }
    q
}

fn run_mode(mode: &str, train: &[AnnotatedDoc], gaps: usize, test: &[AnnotatedDoc], config: &NerConfig) -> NerRow {
    let per_seed: Vec<Prf> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let model = train_tagger(train, seed, config.iterations);
            eval_span_f1(
                |t| model.predict(t),
                test.iter().map(|d| (d.text.as_str(), d.spans.as_slice())),
                config.match_rule,
            )
        })
        .collect();
    let col = |f: fn(&Prf) -> f64| Stat::of(&per_seed.iter().map(f).collect::<Vec<_>>());
    NerRow {
        mode: mode.to_string(),
        train_docs: train.len(),
        train_spans: train.iter().map(|d| d.spans.len()).sum(),
        annotation_gaps: gaps,
        precision: col(|p| p.precision),
        recall: col(|p| p.recall),
        f1: col(|p| p.f1),
        delta_f1: None,
        per_seed,
    }
}

/// Trains one tagger per (mode, seed) and scores it on the original test
/// documents. `variants` maps a mode name to substituted versions of the
/// training documents, matched by id; the original variant is implicit.
pub fn run_experiment(
    train: &[CorpusRecord],
    test: &[CorpusRecord],
    variants: &[(String, Vec<SubstitutedDoc>)],
    config: &NerConfig,
) -> Result<NerResults> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::Experiment("empty train or test split".into()));
    }
    if config.seeds.is_empty() {
        return Err(Error::Experiment("no seeds".into()));
    }
    let test_docs: Vec<AnnotatedDoc> = test.iter().map(annotate_original).collect();
    let mut rows =
        vec![run_mode(ORIGINAL, &train.iter().map(annotate_original).collect::<Vec<_>>(), 0, &test_docs, config)];

    for (mode, docs) in variants {
        let by_id: BTreeMap<&str, &SubstitutedDoc> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
        let mut annotated = Vec::with_capacity(train.len());
        let mut gaps = 0;
        let mut missing = 0;
        for r in train {
            match by_id.get(r.id.as_str()) {
                Some(d) => {
                    let (doc, g) = annotate_substituted(&d.text, &d.surrogates);
                    gaps += g;
                    annotated.push(doc);
                }
                None => missing += 1,
            }
        }
        if missing > 0 {
            log::warn!("mode {mode}: {missing} training documents lack substitution output; row skipped");
            continue;
        }
        if gaps > 0 {
            log::warn!("mode {mode}: {gaps} surrogates not found in their documents");
        }
        rows.push(run_mode(mode, &annotated, gaps, &test_docs, config));
    }

    let base = rows[0].f1.mean;
    for r in &mut rows {
        r.delta_f1 = Some(r.f1.mean - base);
    }

    let mut comparisons = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let sa = Summary::of(&a.per_seed.iter().map(|p| p.f1).collect::<Vec<_>>());
            let sb = Summary::of(&b.per_seed.iter().map(|p| p.f1).collect::<Vec<_>>());
            let (population, sample, note) = match (welch(sa, sb, SdKind::Population), welch(sa, sb, SdKind::Sample)) {
                (Ok(p), Ok(s)) => (Some(p), Some(s), None),
                (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
            };
            comparisons.push(WelchComparison { a: a.mode.clone(), b: b.mode.clone(), population, sample, note });
        }
    }

    Ok(NerResults {
        config: config.clone(),
        train_ids: train.iter().map(|r| r.id.clone()).collect(),
        test_ids: test.iter().map(|r| r.id.clone()).collect(),
        rows,
        comparisons,
    })
}

fn pm(s: &Stat) -> String {
    format!("{:.3}±{:.3}", s.mean, s.pstdev)
}

/// Aligned text table: mode, train spans, P, R, F1, ΔF1, then the Welch
/// comparisons.
pub fn format_ner_table(results: &NerResults) -> String {
    let header = ["Mode", "Train spans", "Precision", "Recall", "F1", "ΔF1"];
    let rows: Vec<[String; 6]> = results
        .rows
        .iter()
        .map(|r| {
            [
                r.mode.clone(),
                r.train_spans.to_string(),
                pm(&r.precision),
                pm(&r.recall),
                pm(&r.f1),
                r.delta_f1.map(|d| format!("{d:+.3}")).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let mut out = crate::report::align(&header, &rows);
    if !results.comparisons.is_empty() {
        out.push('\n');
        for c in &results.comparisons {
            match (&c.population, &c.sample) {
                (Some(p), Some(s)) => {
                    let _ = writeln!(
                        out,
                        "{} vs {}: t = {:.2}, dof = {:.1}, p = {:.4} (sample SD: t = {:.2}, p = {:.4})",
                        c.a, c.b, p.t, p.dof, p.p, s.t, s.p
                    );
                }
                _ => {
                    let _ = writeln!(out, "{} vs {}: {}", c.a, c.b, c.note.as_deref().unwrap_or("undefined"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{synth_corpus, LocaleMix};

    #[test]
    fn split_is_stratified_and_disjoint() {
        let corpus = synth_corpus(300, 5, &LocaleMix::default());
        let (train, test) = stratified_split(&corpus, 160, 40, 0).unwrap();
        assert_eq!((train.len(), test.len()), (160, 40));
        let ids: std::collections::HashSet<_> = train.iter().chain(&test).map(|r| &r.id).collect();
        assert_eq!(ids.len(), 200);
        let share =
            |v: &[CorpusRecord], tag: &str| v.iter().filter(|r| r.locale == tag).count() as f64 / v.len() as f64;
        assert!((share(&train, "en_US") - share(&test, "en_US")).abs() < 0.05);
        assert!(stratified_split(&corpus, 300, 1, 0).is_err());
    }

    #[test]
    fn apportion_sums() {
        assert_eq!(apportion(&[5, 3, 2], 5).iter().sum::<usize>(), 5);
        assert_eq!(apportion(&[1, 1], 2), vec![1, 1]);
    }
}
