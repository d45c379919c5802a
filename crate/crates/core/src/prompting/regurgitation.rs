use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::pools::PoolSet;
use crate::model::{DecisionSource, SurrogateDecision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopySide {
    /// Equal to a demo's `Fake:` string.
    Output,
    /// Equal to a demo's `Real:` string.
    Input,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyFlag {
    pub surrogate: String,
    pub class: Option<String>,
    pub demo: String,
    pub side: CopySide,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCounts {
    pub output_copies: usize,
    pub input_copies: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub decisions: usize,
    pub output_copies: usize,
    pub input_copies: usize,
    pub first_demo_output_copies: usize,
    pub cross_locale_copies: usize,
    pub fallbacks: usize,
    pub unique_surrogates: usize,
    /// Twice the size of the class's own pool, when it has one.
    pub ceiling: Option<usize>,
}

impl ClassStats {
    pub fn first_demo_rate(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.first_demo_output_copies as f64 / self.decisions as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegurgitationReport {
    /// Decisions that went through an SLM call (accepted or fallen back).
    pub slm_calls: usize,
    pub accepted: usize,
    pub validation_failures: usize,
    pub output_copies: usize,
    pub input_copies: usize,
    pub first_demo_output_copies: usize,
    pub cross_locale_copies: usize,
    /// Matches keyed by the pool the copied demo belongs to.
    pub per_pool: BTreeMap<String, SideCounts>,
    /// Statistics keyed by the pool the input was classified into.
    pub per_class: BTreeMap<String, ClassStats>,
    pub flags: Vec<CopyFlag>,
}

/// Flags SLM surrogates that equal a demonstration string verbatim.
pub fn analyze_regurgitation(decisions: &[SurrogateDecision], pools: &PoolSet) -> RegurgitationReport {
    let mut report = RegurgitationReport::default();
    let mut uniques: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();

    for decision in decisions.iter().filter(|d| d.is_slm_call()) {
        report.slm_calls += 1;
        let class_key = decision.class.clone().unwrap_or_else(|| "unclassified".into());
        let stats = report.per_class.entry(class_key.clone()).or_default();
        stats.decisions += 1;
        if decision.source == DecisionSource::FallbackFake {
            report.validation_failures += 1;
            stats.fallbacks += 1;
            continue;
        }
        report.accepted += 1;
        let surrogate = decision.surrogate.trim();
        uniques.entry(class_key.clone()).or_default().insert(surrogate);

        let mut matched_pools = BTreeSet::new();
        let (mut out_hit, mut in_hit) = (false, false);
        for pool in pools.iter() {
            for demo in &pool.demos {
                for (side, text) in [(CopySide::Output, &demo.fake), (CopySide::Input, &demo.real)] {
                    if text.trim() != surrogate {
                        continue;
                    }
                    let counts = report.per_pool.entry(pool.id()).or_default();
                    match side {
                        CopySide::Output => {
                            counts.output_copies += 1;
                            out_hit = true;
                        }
                        CopySide::Input => {
                            counts.input_copies += 1;
                            in_hit = true;
                        }
                    }
                    matched_pools.insert(pool.id());
                    report.flags.push(CopyFlag {
                        surrogate: surrogate.to_string(),
                        class: decision.class.clone(),
                        demo: demo.id.clone(),
                        side,
                    });
                }
            }
        }
        let first_demo =
            decision.demos_used.first().and_then(|id| pools.iter().flat_map(|p| p.demos.iter()).find(|d| &d.id == id));
        let first_copy = first_demo.is_some_and(|d| d.fake.trim() == surrogate);
        let cross = !matched_pools.is_empty() && !matched_pools.contains(&class_key);

        let stats = report.per_class.get_mut(&class_key).expect("inserted above");
        if out_hit {
            report.output_copies += 1;
            stats.output_copies += 1;
        }
        if in_hit {
            report.input_copies += 1;
            stats.input_copies += 1;
        }
        if first_copy {
            report.first_demo_output_copies += 1;
            stats.first_demo_output_copies += 1;
        }
        if cross {
            report.cross_locale_copies += 1;
            stats.cross_locale_copies += 1;
        }
    }

    for (class, stats) in report.per_class.iter_mut() {
        stats.unique_surrogates = uniques.get(class).map_or(0, BTreeSet::len);
        stats.ceiling = pools.iter().find(|p| &p.id() == class).map(|p| 2 * p.len());
    }
    report
}
