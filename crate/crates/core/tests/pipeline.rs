use std::collections::BTreeMap;
use std::fs;

use surrogate_core::adapter::AdapterConfig;
use surrogate_core::detect::DetectorKind;
use surrogate_core::metrics::count_occurrences;
use surrogate_core::pipeline::{load_run, persist_run, run_corpus, run_records, RunConfig, ScorerConfig};
use surrogate_core::{CorpusRecord, Label, Mode};

fn config(n: usize, detector: DetectorKind) -> RunConfig {
    let mut c = RunConfig::default();
    c.synth.n = n;
    c.detector = detector;
    c.scorer = ScorerConfig::None;
    c
}

#[test]
fn oracle_leak_is_zero_in_every_mode() {
    let (results, _) = run_corpus(&config(60, DetectorKind::Oracle)).unwrap();
    for mode in Mode::ALL {
        let m = results.aggregate(mode).unwrap();
        assert_eq!(m.leak, Some(0.0), "{mode:?}");
        assert_eq!(m.docs, 60);
    }
}

#[test]
fn leak_is_identical_across_modes_for_a_fixed_detector() {
    for detector in [DetectorKind::Oracle, DetectorKind::Rules] {
        let (results, _) = run_corpus(&config(60, detector)).unwrap();
        let leaks: Vec<_> = Mode::ALL.iter().map(|&m| results.aggregate(m).unwrap().leak.map(f64::to_bits)).collect();
        assert!(leaks.windows(2).all(|w| w[0] == w[1]), "{detector:?}: {leaks:?}");
        let per_doc: Vec<BTreeMap<&str, Option<u64>>> = Mode::ALL
            .iter()
            .map(|&m| results.docs(m).map(|d| (d.id.as_str(), d.metrics.leak.map(f64::to_bits))).collect())
            .collect();
        assert_eq!(per_doc[0], per_doc[1]);
        assert_eq!(per_doc[1], per_doc[2]);
    }
}

#[test]
fn rules_detector_leaks_names_but_not_patterns() {
    let (results, _) = run_corpus(&config(40, DetectorKind::Rules)).unwrap();
    let leak = results.aggregate(Mode::Redact).unwrap().leak.unwrap();
    assert!(leak > 0.0 && leak < 1.0, "{leak}");
}

#[test]
fn consistency_is_one_by_decisions_and_by_counting() {
    let (results, _) = run_corpus(&config(80, DetectorKind::Oracle)).unwrap();
    for mode in Mode::ALL {
        let m = results.aggregate(mode).unwrap();
        assert_eq!(m.consistency, Some(1.0), "{mode:?}");
        assert_eq!(m.consistency_discrepancies, 0);
    }
    for doc in &results.documents {
        let surrogates = doc.span_surrogates();
        for g in doc.decisions.iter().filter(|g| g.members.len() > 1) {
            assert!(g.members.iter().all(|&i| surrogates[i] == surrogates[g.members[0]]));
            let s = g.decision.surrogate.trim();
            assert!(count_occurrences(&doc.output, s) >= g.members.len(), "{}: {s}", doc.id);
        }
    }
}

#[test]
fn persisted_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run_id in ["a", "b"] {
        let mut c = config(30, DetectorKind::Oracle);
        c.scorer = ScorerConfig::Ngram;
        c.output = dir.path().to_path_buf();
        c.run_id = run_id.into();
        let (results, timings) = run_corpus(&c).unwrap();
        persist_run(&c.run_dir(), &results, &timings).unwrap();
        files.push(c.run_dir());
    }
    // primary.txt carries wall-clock latency and is left out
    for name in ["results.json", "metrics.json", "distinctness.txt", "regurgitation.json"] {
        let a = fs::read(files[0].join(name)).unwrap();
        let b = fs::read(files[1].join(name)).unwrap();
        // the run id is part of the payload; compare with it normalised
        let norm = |v: Vec<u8>, id: &str| String::from_utf8(v).unwrap().replace(&format!("\"run_id\": \"{id}\""), "");
        assert_eq!(norm(a, "a"), norm(b, "b"), "{name}");
    }
    let (loaded, timings) = load_run(&files[0]).unwrap();
    assert_eq!(loaded.documents.len(), 90);
    assert!(timings.is_some());
}

#[test]
fn thread_count_does_not_change_results() {
    let mut one = config(40, DetectorKind::Oracle);
    one.threads = Some(1);
    let mut many = one.clone();
    many.threads = Some(4);
    let a = serde_json::to_string(&run_corpus(&one).unwrap().0).unwrap();
    let b = serde_json::to_string(&run_corpus(&many).unwrap().0).unwrap();
    assert_eq!(a, b);
}

#[cfg(unix)]
#[test]
fn external_detector_spans_drive_the_run() {
    let text = "Dear John Smith, your code is 4417.";
    let record = CorpusRecord {
        id: "ext-1".into(),
        text: text.into(),
        locale: "en_US".into(),
        template: "letter".into(),
        pii_gt: BTreeMap::from([(Label::Person, vec!["John Smith".to_string()])]),
    };
    let mut c = config(1, DetectorKind::External);
    c.modes = vec![Mode::Redact];
    c.external_detector = Some(AdapterConfig::new(
        r#"sh -c 'cat >/dev/null; echo "{\"spans\": [{\"start\": 5, \"end\": 15, \"label\": \"PERSON\"}]}"'"#,
    ));
    let (results, _) = run_records(&c, &[record]).unwrap();
    let doc = &results.documents[0];
    assert_eq!(doc.error, None);
    assert_eq!(doc.output, "Dear [PERSON], your code is 4417.");
    assert_eq!(doc.metrics.leak, Some(0.0));
}

#[cfg(unix)]
#[test]
fn failing_external_detector_is_reported() {
    let mut c = config(3, DetectorKind::External);
    c.external_detector = Some(AdapterConfig::new("sh -c 'exit 3'"));
    match run_corpus(&c) {
        Err(e) => assert!(e.to_string().contains("detector"), "{e}"),
        Ok((results, _)) => assert!(results.documents.iter().all(|d| d.error.is_some())),
    }
}
