//! Corpus files and the synthetic corpus generator.
//!
//! A corpus file is a JSON array of records:
//! `{"id", "text", "locale", "template", "pii_gt": {"PERSON": [...], ...}}`.
//! Ground truth is keyed by label; each value is listed once however many
//! times it occurs in the text.

mod synth;

use std::collections::HashSet;
use std::path::Path;

use serde_json::Value;

pub use synth::{synth_corpus, LocaleMix, TEMPLATES};

use crate::error::{Error, Result};
use crate::model::CorpusRecord;

const FIELDS: [&str; 5] = ["id", "text", "locale", "template", "pii_gt"];

pub fn parse_corpus(raw: &str) -> Result<Vec<CorpusRecord>> {
    let values: Vec<Value> = serde_json::from_str(raw)
        .map_err(|e| Error::CorpusFormat { index: 0, message: format!("not a JSON array of records: {e}") })?;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(values.len());
    for (index, value) in values.into_iter().enumerate() {
        let fail = |message: String| Error::CorpusFormat { index, message };
        let obj = value.as_object().ok_or_else(|| fail("record is not an object".into()))?;
        if let Some(missing) = FIELDS.iter().find(|f| !obj.contains_key(**f)) {
            return Err(fail(format!("missing field `{missing}`")));
        }
        let record: CorpusRecord = serde_json::from_value(value).map_err(|e| fail(e.to_string()))?;
        if record.id.is_empty() {
            return Err(fail("empty id".into()));
        }
        if !seen.insert(record.id.clone()) {
            return Err(fail(format!("duplicate id `{}`", record.id)));
        }
        if let Some((label, _)) = record.gt_values().find(|(_, v)| v.trim().is_empty()) {
            return Err(fail(format!("empty {label} ground-truth value")));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusRecord>> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&raw)
}

pub fn save_corpus(path: &Path, records: &[CorpusRecord]) -> Result<()> {
    let mut raw = serde_json::to_string_pretty(records)?;
    raw.push('\n');
    std::fs::write(path, raw).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str =
        r#"{"id":"a","text":"Hi John Smith","locale":"en_US","template":"invoice","pii_gt":{"PERSON":["John Smith"]}}"#;

    #[test]
    fn parses_records_in_order() {
        let raw = format!("[{ONE},{},{}]", ONE.replace("\"a\"", "\"b\""), ONE.replace("\"a\"", "\"c\""));
        let recs = parse_corpus(&raw).unwrap();
        assert_eq!(recs.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(recs[0].gt_count(), 1);
    }

    #[test]
    fn missing_text_names_the_index() {
        let raw = format!("[{ONE},{}]", ONE.replace(r#""text":"Hi John Smith","#, "").replace("\"a\"", "\"b\""));
        match parse_corpus(&raw) {
            Err(Error::CorpusFormat { index: 1, message }) => assert!(message.contains("text"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        assert!(matches!(parse_corpus(&format!("[{ONE},{ONE}]")), Err(Error::CorpusFormat { index: 1, .. })));
    }

    #[test]
    fn acct_alias_accepted() {
        let raw = format!("[{}]", ONE.replace("\"PERSON\"", "\"ACCT\""));
        let recs = parse_corpus(&raw).unwrap();
        assert!(recs[0].pii_gt.contains_key(&crate::model::Label::Account));
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let recs = synth_corpus(5, 1, &LocaleMix::default());
        save_corpus(&path, &recs).unwrap();
        assert_eq!(load_corpus(&path).unwrap(), recs);
    }
}
