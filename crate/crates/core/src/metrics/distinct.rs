use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{Label, Mode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctRow {
    pub label: Label,
    pub mode: Mode,
    pub mentions: usize,
    pub unique: usize,
    /// Unrounded; see [`round3`] for display.
    pub ttr: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DistinctnessReport {
    pub rows: Vec<DistinctRow>,
}

impl DistinctnessReport {
    pub fn row(&self, label: Label, mode: Mode) -> Option<&DistinctRow> {
        self.rows.iter().find(|r| r.label == label && r.mode == mode)
    }
}

/// Mention-level surrogates grouped by (label, mode); unique counts are
/// over exact strings.
pub fn distinctness<'a>(mentions: impl IntoIterator<Item = (Label, Mode, &'a str)>) -> DistinctnessReport {
    let mut by_key: BTreeMap<(Mode, Label), (usize, BTreeSet<&str>)> = BTreeMap::new();
    for (label, mode, surrogate) in mentions {
        let entry = by_key.entry((mode, label)).or_default();
        entry.0 += 1;
        entry.1.insert(surrogate);
    }
    let rows = by_key
        .into_iter()
        .map(|((mode, label), (mentions, set))| DistinctRow {
            label,
            mode,
            mentions,
            unique: set.len(),
            ttr: set.len() as f64 / mentions as f64,
        })
        .collect();
    DistinctnessReport { rows }
}

/// Three-decimal presentation rounding (half away from zero).
pub fn round3(x: f64) -> String {
    format!("{:.3}", (x * 1000.0).round() / 1000.0)
}
