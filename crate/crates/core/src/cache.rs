//! Entity resolution and the corpus-wide surrogate cache.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{canonicalize, CacheKey, EntityGroup, PiiSpan, SurrogateDecision};

/// Groups spans by `(canonical surface, label)` in first-mention order.
pub fn resolve_entities(spans: &[PiiSpan]) -> Result<Vec<EntityGroup>> {
    let mut groups: Vec<EntityGroup> = Vec::new();
    let mut by_key: HashMap<(String, crate::model::Label), usize> = HashMap::new();
    for (i, span) in spans.iter().enumerate() {
        let canonical = canonicalize(&span.surface)?;
        let slot = *by_key.entry((canonical.clone(), span.label)).or_insert_with(|| {
            groups.push(EntityGroup { canonical, label: span.label, members: Vec::new() });
            groups.len() - 1
        });
        groups[slot].members.push(i);
    }
    Ok(groups)
}

type Slot = Arc<Mutex<Option<SurrogateDecision>>>;

/// Memoizes one decision per [`CacheKey`].
///
/// Concurrent first requests for a key serialize on that key's slot, so the
/// proposer runs at most once per key. A proposer error leaves the slot
/// empty and the next caller retries.
#[derive(Debug, Default)]
pub struct SurrogateCache {
    slots: Mutex<HashMap<CacheKey, Slot>>,
    proposals: AtomicU64,
    hits: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CacheCounters {
    pub proposals_made: u64,
    pub cache_hits: u64,
    pub entries: u64,
}

const CACHE_FORMAT: &str = "surrogate-cache";
const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    key: CacheKey,
    decision: SurrogateDecision,
}

impl SurrogateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_propose<E>(
        &self,
        key: &CacheKey,
        propose: impl FnOnce() -> std::result::Result<SurrogateDecision, E>,
    ) -> std::result::Result<SurrogateDecision, E> {
        let slot = {
            let mut slots = self.slots.lock().unwrap();
            Arc::clone(slots.entry(key.clone()).or_default())
        };
        let mut guard = slot.lock().unwrap();
        if let Some(decision) = guard.as_ref() {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(decision.clone());
        }
        let decision = propose()?;
        *guard = Some(decision.clone());
        self.proposals.fetch_add(1, Ordering::Relaxed);
        Ok(decision)
    }

    pub fn get(&self, key: &CacheKey) -> Option<SurrogateDecision> {
        let slot = self.slots.lock().unwrap().get(key).cloned()?;
        let guard = slot.lock().unwrap();
        guard.clone()
    }

    pub fn counters(&self) -> CacheCounters {
        CacheCounters {
            proposals_made: self.proposals.load(Ordering::Relaxed),
            cache_hits: self.hits.load(Ordering::Relaxed),
            entries: self.snapshot().len() as u64,
        }
    }

    /// All stored decisions, sorted by key.
    pub fn snapshot(&self) -> Vec<(CacheKey, SurrogateDecision)> {
        let slots: Vec<(CacheKey, Slot)> =
            self.slots.lock().unwrap().iter().map(|(k, v)| (k.clone(), Arc::clone(v))).collect();
        let mut out: Vec<(CacheKey, SurrogateDecision)> =
            slots.into_iter().filter_map(|(k, slot)| slot.lock().unwrap().clone().map(|d| (k, d))).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Writes a versioned JSON-lines file: a header line, then one
    /// `{key, decision}` record per line in key order.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let header = CacheHeader { format: CACHE_FORMAT.into(), version: CACHE_VERSION };
        let mut write_line = |value: String| writeln!(w, "{value}").map_err(|e| Error::io(path, e));
        write_line(serde_json::to_string(&header)?)?;
        for (key, decision) in self.snapshot() {
            write_line(serde_json::to_string(&CacheRecord { key, decision })?)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Loads a file written by [`SurrogateCache::save`]. Loaded entries are
    /// served as hits and do not count as proposals.
    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header_line =
            lines.next().ok_or_else(|| Error::CacheFormat("missing header".into()))?.map_err(|e| Error::io(path, e))?;
        let header: CacheHeader =
            serde_json::from_str(&header_line).map_err(|e| Error::CacheFormat(format!("bad header: {e}")))?;
        if header.format != CACHE_FORMAT || header.version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported cache {} v{}", header.format, header.version)));
        }
        let cache = Self::new();
        {
            let mut slots = cache.slots.lock().unwrap();
            for (n, line) in lines.enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheRecord =
                    serde_json::from_str(&line).map_err(|e| Error::CacheFormat(format!("line {}: {e}", n + 2)))?;
                slots.insert(rec.key, Arc::new(Mutex::new(Some(rec.decision))));
            }
        }
        Ok(cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DecisionSource, Label, Mode};
    use std::sync::atomic::AtomicUsize;
    use std::sync::Barrier;
    use std::thread;

    fn span(start: usize, surface: &str, label: Label) -> PiiSpan {
        PiiSpan { start, end: start + surface.chars().count(), label, surface: surface.into() }
    }

    fn key(canonical: &str) -> CacheKey {
        CacheKey { mode: Mode::Hybrid, family: "mock-pool".into(), canonical: canonical.into(), label: Label::Person }
    }

    #[test]
    fn case_variants_share_a_group() {
        let groups =
            resolve_entities(&[span(0, "John Smith", Label::Person), span(20, "JOHN SMITH", Label::Person)]).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].members, vec![0, 1]);
        assert_eq!(groups[0].canonical, "john smith");
    }

    #[test]
    fn no_coreference_and_label_in_key() {
        let groups = resolve_entities(&[
            span(0, "John", Label::Person),
            span(10, "John Smith", Label::Person),
            span(30, "John Smith", Label::Account),
        ])
        .unwrap();
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0].canonical, "john");
    }

    #[test]
    fn memoizes_per_key() {
        let cache = SurrogateCache::new();
        let calls = AtomicUsize::new(0);
        let propose = || {
            calls.fetch_add(1, Ordering::SeqCst);
            Ok::<_, ()>(SurrogateDecision::plain("Marcus Chen", DecisionSource::Fake))
        };
        let a = cache.get_or_propose(&key("john smith"), propose).unwrap();
        let b = cache.get_or_propose(&key("john smith"), propose).unwrap();
        assert_eq!(a, b);
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        cache.get_or_propose(&key("jane doe"), propose).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 2);
        let c = cache.counters();
        assert_eq!((c.proposals_made, c.cache_hits, c.entries), (2, 1, 2));
    }

    #[test]
    fn mention_level_requests_collapse_to_unique_keys() {
        // 660 mentions over 482 distinct entities
        let cache = SurrogateCache::new();
        for i in 0..660 {
            let k = key(&format!("entity {}", i % 482));
            cache
                .get_or_propose(&k, || Ok::<_, ()>(SurrogateDecision::plain(format!("s{i}"), DecisionSource::Fake)))
                .unwrap();
        }
        let c = cache.counters();
        assert_eq!(c.proposals_made, 482);
        assert_eq!(c.cache_hits, 660 - 482);
    }

    #[test]
    fn failures_are_not_cached() {
        let cache = SurrogateCache::new();
        let err = cache.get_or_propose(&key("x"), || Err::<SurrogateDecision, _>("backend down"));
        assert!(err.is_err());
        assert!(cache.get(&key("x")).is_none());
        let ok = cache.get_or_propose(&key("x"), || Ok::<_, &str>(SurrogateDecision::plain("y", DecisionSource::Fake)));
        assert_eq!(ok.unwrap().surrogate, "y");
        assert_eq!(cache.counters().proposals_made, 1);
    }

    #[test]
    fn concurrent_first_requests_run_proposer_once() {
        let cache = Arc::new(SurrogateCache::new());
        let calls = Arc::new(AtomicUsize::new(0));
        let barrier = Arc::new(Barrier::new(16));
        let handles: Vec<_> = (0..16)
            .map(|_| {
                let (cache, calls, barrier) = (cache.clone(), calls.clone(), barrier.clone());
                thread::spawn(move || {
                    barrier.wait();
                    cache
                        .get_or_propose(&key("shared"), || {
                            calls.fetch_add(1, Ordering::SeqCst);
                            thread::sleep(std::time::Duration::from_millis(20));
                            Ok::<_, ()>(SurrogateDecision::plain("only", DecisionSource::Fake))
                        })
                        .unwrap()
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap().surrogate, "only");
        }
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        assert_eq!(cache.counters().cache_hits, 15);
    }

    #[test]
    fn persistence_round_trip() {
        let cache = SurrogateCache::new();
        for name in ["b", "a", "杨娟"] {
            cache
                .get_or_propose(&key(name), || {
                    Ok::<_, ()>(SurrogateDecision::plain(format!("{name}!"), DecisionSource::Fake))
                })
                .unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        cache.save(&path).unwrap();
        let loaded = SurrogateCache::load(&path).unwrap();
        assert_eq!(loaded.snapshot(), cache.snapshot());
        let hit = loaded.get_or_propose(&key("杨娟"), || Err::<SurrogateDecision, _>(())).unwrap();
        assert_eq!(hit.surrogate, "杨娟!");

        fs::write(&path, "{\"format\":\"surrogate-cache\",\"version\":9}\n").unwrap();
        assert!(matches!(SurrogateCache::load(&path), Err(Error::CacheFormat(_))));
    }
}
