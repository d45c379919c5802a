//! Plain-text tables. Numbers are rounded here and nowhere else.

use std::fmt::Write as _;

use crate::metrics::{round3, DistinctnessReport};
use crate::model::Label;
use crate::pipeline::{RunResults, RunTimings};
use crate::prompting::RegurgitationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Primary,
    Distinctness,
    Regurgitation,
    Ner,
}

impl std::str::FromStr for ReportKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primary" => Ok(ReportKind::Primary),
            "distinctness" => Ok(ReportKind::Distinctness),
            "regurgitation" => Ok(ReportKind::Regurgitation),
            "ner" => Ok(ReportKind::Ner),
            _ => Err(format!("unknown report kind `{s}` (expected primary, distinctness, regurgitation or ner)")),
        }
    }
}

/// Left-aligned first column, right-aligned others.
pub fn align<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn opt3(x: Option<f64>) -> String {
    x.map(round3).unwrap_or_else(|| "-".into())
}

/// Mode / Leak / PPL / Consistency / LengthPres / Latency.
pub fn format_primary(results: &RunResults, timings: Option<&RunTimings>) -> String {
    let rows: Vec<[String; 6]> = results
        .aggregates
        .iter()
        .map(|a| {
            [
                a.mode.name().to_string(),
                opt3(a.metrics.leak),
                a.metrics.ppl.map(|p| format!("{p:.1}")).unwrap_or_else(|| "-".into()),
                opt3(a.metrics.consistency),
                opt3(a.metrics.length_pres),
                timings
                    .and_then(|t| t.mean_latency_ms(a.mode))
                    .map(|ms| format!("{ms:.2} ms"))
                    .unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    align(&["Mode", "Leak", "PPL", "Consistency", "LengthPres", "Latency"], &rows)
}

/// Mentions / unique / TTR per label and mode.
pub fn format_distinctness(report: &DistinctnessReport) -> String {
    let rows: Vec<[String; 5]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.label.name().to_string(),
                r.mode.name().to_string(),
                r.mentions.to_string(),
                r.unique.to_string(),
                round3(r.ttr),
            ]
        })
        .collect();
    align(&["Label", "Mode", "Mentions", "Unique", "TTR"], &rows)
}

pub fn format_regurgitation(report: &RegurgitationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "SLM calls: {}  accepted: {}  validation failures: {}",
        report.slm_calls, report.accepted, report.validation_failures
    );
    let _ = writeln!(
        out,
        "output copies: {}  input copies: {}  first-demo output copies: {}  cross-locale copies: {}\n",
        report.output_copies, report.input_copies, report.first_demo_output_copies, report.cross_locale_copies
    );
    let rows: Vec<[String; 8]> = report
        .per_class
        .iter()
        .map(|(class, s)| {
            [
                class.clone(),
                s.decisions.to_string(),
                s.output_copies.to_string(),
                s.input_copies.to_string(),
                s.first_demo_output_copies.to_string(),
                s.cross_locale_copies.to_string(),
                s.unique_surrogates.to_string(),
                s.ceiling.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    out.push_str(&align(
        &["Class", "Calls", "OutCopy", "InCopy", "FirstDemo", "CrossLocale", "Unique", "Ceiling"],
        &rows,
    ));
    out
}

/// Unique surrogate count for `label` in `mode`, if any mentions exist.
pub fn unique_count(results: &RunResults, label: Label, mode: crate::model::Mode) -> Option<usize> {
    results.distinctness.row(label, mode).map(|r| r.unique)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::distinctness;
    use crate::model::Mode;

    #[test]
    fn kinds() {
        assert_eq!("ner".parse::<ReportKind>().unwrap(), ReportKind::Ner);
        assert!("tables".parse::<ReportKind>().is_err());
    }

    #[test]
    fn empty_tables_keep_headers() {
        let t = format_distinctness(&DistinctnessReport::default());
        assert!(t.starts_with("Label  Mode  Mentions  Unique  TTR\n"));
        assert_eq!(t.lines().count(), 2);
        let r = RunResults {
            run_id: "x".into(),
            ppl_scorer: None,
            documents: vec![],
            aggregates: vec![],
            cache: Default::default(),
            distinctness: Default::default(),
            regurgitation: None,
        };
        assert!(format_primary(&r, None).starts_with("Mode  Leak  PPL  Consistency  LengthPres  Latency"));
    }

    #[test]
    fn distinctness_rows_render() {
        let m: Vec<(Label, Mode, String)> =
            (0..162).map(|i| (Label::Address, Mode::Faker, format!("a{}", i % 18))).collect();
        let t = format_distinctness(&distinctness(m.iter().map(|(l, md, s)| (*l, *md, s.as_str()))));
        assert!(t.lines().nth(2).unwrap().ends_with("0.111"), "{t}");
    }
}
