use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locale::{classify_date_format, classify_locale, DateFormat, Locale};
use crate::model::Label;

const BUILTIN_POOLS: &str = include_str!("../../data/pools.json");

/// Entity families that have demonstration pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Person,
    Address,
    Date,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Person, Family::Address, Family::Date];

    pub fn of(label: Label) -> Option<Family> {
        match label {
            Label::Person => Some(Family::Person),
            Label::Address => Some(Family::Address),
            Label::Date => Some(Family::Date),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Family::Person => "person",
            Family::Address => "address",
            Family::Date => "date",
        }
    }

    /// Pool key the heuristics assign to `surface`.
    pub fn classify(self, surface: &str) -> PoolKey {
        match self {
            Family::Person | Family::Address => PoolKey::Locale(classify_locale(surface)),
            Family::Date => PoolKey::Date(classify_date_format(surface)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKey {
    Locale(Locale),
    Date(DateFormat),
    /// The single fixed three-shot template of the pilot strategy.
    Fixed,
}

impl fmt::Display for PoolKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolKey::Locale(l) => f.write_str(l.code()),
            PoolKey::Date(d) => f.write_str(d.code()),
            PoolKey::Fixed => f.write_str("fixed"),
        }
    }
}

/// Stable name of a pool, e.g. `person/zh`.
pub fn pool_id(family: Family, key: PoolKey) -> String {
    format!("{}/{}", family.code(), key)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demo {
    pub id: String,
    pub real: String,
    pub fake: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoPool {
    pub family: Family,
    pub key: PoolKey,
    pub demos: Vec<Demo>,
}

impl DemoPool {
    pub fn id(&self) -> String {
        pool_id(self.family, self.key)
    }

    pub fn len(&self) -> usize {
        self.demos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demos.is_empty()
    }

    fn minimum_size(&self) -> usize {
        // the unknown-date fallback pool ships with two entries
        if self.key == PoolKey::Date(DateFormat::Unknown) {
            2
        } else {
            3
        }
    }
}

/// A demo string that does not classify into its own pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureViolation {
    pub pool: String,
    pub demo: String,
    pub text: String,
    pub classified_as: String,
}

#[derive(Debug, Deserialize)]
struct DemoPair {
    real: String,
    fake: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoolFile {
    person: BTreeMap<Locale, Vec<DemoPair>>,
    address: BTreeMap<Locale, Vec<DemoPair>>,
    date: BTreeMap<DateFormat, Vec<DemoPair>>,
    fixed: BTreeMap<Family, Vec<DemoPair>>,
}

/// Every demonstration pool, keyed by family and pool key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolSet {
    pools: BTreeMap<(Family, PoolKey), DemoPool>,
}

impl PoolSet {
    /// The pools shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN_POOLS).expect("built-in pools are valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw)
    }

    /// Parses and validates a pool document. Missing pools, undersized
    /// pools and malformed demos are errors; closure violations are logged
    /// and available from [`PoolSet::closure_violations`].
    pub fn from_json(raw: &str) -> Result<Self> {
        let file: PoolFile = serde_json::from_str(raw).map_err(|e| Error::PoolFormat(e.to_string()))?;
        let mut pools = BTreeMap::new();
        let mut add = |family: Family, key: PoolKey, pairs: Vec<DemoPair>| -> Result<()> {
            let id = pool_id(family, key);
            let demos = pairs
                .into_iter()
                .enumerate()
                .map(|(i, p)| {
                    let (real, fake) = (p.real.trim().to_string(), p.fake.trim().to_string());
                    if real.is_empty() || fake.is_empty() || real == fake || real.contains('\n') || fake.contains('\n')
                    {
                        return Err(Error::PoolFormat(format!(
                            "{id}#{i}: demo strings must be non-empty, single-line and distinct"
                        )));
                    }
                    Ok(Demo { id: format!("{id}#{i}"), real, fake })
                })
                .collect::<Result<Vec<_>>>()?;
            pools.insert((family, key), DemoPool { family, key, demos });
            Ok(())
        };
        for (locale, pairs) in file.person {
            add(Family::Person, PoolKey::Locale(locale), pairs)?;
        }
        for (locale, pairs) in file.address {
            add(Family::Address, PoolKey::Locale(locale), pairs)?;
        }
        for (format, pairs) in file.date {
            add(Family::Date, PoolKey::Date(format), pairs)?;
        }
        for (family, pairs) in file.fixed {
            add(family, PoolKey::Fixed, pairs)?;
        }
        let set = Self { pools };
        set.check_complete()?;
        let violations = set.closure_violations();
        if !violations.is_empty() {
            log::warn!("{} demo strings classify outside their own pool", violations.len());
        }
        for v in violations {
            log::debug!("demo {} `{}` in pool {} classifies as {}", v.demo, v.text, v.pool, v.classified_as);
        }
        Ok(set)
    }

    fn check_complete(&self) -> Result<()> {
        let mut required: Vec<(Family, PoolKey)> = Vec::new();
        for family in [Family::Person, Family::Address] {
            required.extend(Locale::ALL.map(|l| (family, PoolKey::Locale(l))));
        }
        required.extend(DateFormat::ALL.map(|d| (Family::Date, PoolKey::Date(d))));
        required.extend(Family::ALL.map(|f| (f, PoolKey::Fixed)));
        for (family, key) in required {
            let pool = self
                .pools
                .get(&(family, key))
                .ok_or_else(|| Error::PoolFormat(format!("missing pool {}", pool_id(family, key))))?;
            if pool.len() < pool.minimum_size() {
                return Err(Error::PoolTooSmall { pool: pool.id(), size: pool.len(), required: pool.minimum_size() });
            }
            if key == PoolKey::Fixed && pool.len() != 3 {
                return Err(Error::PoolFormat(format!("{} must hold exactly 3 demos", pool.id())));
            }
            if pool.len() < 4 && pool.minimum_size() == 3 && key != PoolKey::Fixed {
                log::warn!("pool {} has only {} demos", pool.id(), pool.len());
            }
        }
        Ok(())
    }

    pub fn get(&self, family: Family, key: PoolKey) -> Option<&DemoPool> {
        self.pools.get(&(family, key))
    }

    pub fn fixed(&self, family: Family) -> &DemoPool {
        self.pools.get(&(family, PoolKey::Fixed)).expect("validated at load")
    }

    pub fn iter(&self) -> impl Iterator<Item = &DemoPool> {
        self.pools.values()
    }

    /// Demo strings (either side) that classify outside their own pool.
    /// Fixed pools are mixed-locale by construction and are skipped.
    pub fn closure_violations(&self) -> Vec<ClosureViolation> {
        let mut out = Vec::new();
        for pool in self.iter().filter(|p| p.key != PoolKey::Fixed) {
            for demo in &pool.demos {
                for text in [&demo.real, &demo.fake] {
                    let got = pool.family.classify(text);
                    if got != pool.key {
                        out.push(ClosureViolation {
                            pool: pool.id(),
                            demo: demo.id.clone(),
                            text: text.clone(),
                            classified_as: pool_id(pool.family, got),
                        });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_pool_sizes() {
        let pools = PoolSet::builtin();
        assert_eq!(pools.get(Family::Person, PoolKey::Locale(Locale::En)).unwrap().len(), 8);
        for l in [Locale::De, Locale::Es, Locale::Ja, Locale::Zh] {
            assert_eq!(pools.get(Family::Person, PoolKey::Locale(l)).unwrap().len(), 6);
        }
        for l in Locale::ALL {
            assert_eq!(pools.get(Family::Address, PoolKey::Locale(l)).unwrap().len(), 6);
        }
        let sizes: Vec<usize> =
            DateFormat::ALL.iter().map(|d| pools.get(Family::Date, PoolKey::Date(*d)).unwrap().len()).collect();
        assert_eq!(sizes, vec![5, 4, 4, 3, 2]);
        assert_eq!(pools.fixed(Family::Person).demos[0].fake, "Alice Johnson");
        assert_eq!(pools.fixed(Family::Address).demos[0].fake, "123 Main Street, Boston MA 02101");
        assert_eq!(pools.fixed(Family::Date).demos[0].fake, "03/15/1985");
    }

    #[test]
    fn only_kanji_person_names_escape_closure() {
        // kanji-only Japanese names route to zh; everything else is closed
        let violations = PoolSet::builtin().closure_violations();
        assert_eq!(violations.len(), 12);
        assert!(violations.iter().all(|v| v.pool == "person/ja" && v.classified_as == "person/zh"));
    }

    #[test]
    fn demo_ids_are_stable() {
        let pools = PoolSet::builtin();
        let zh = pools.get(Family::Person, PoolKey::Locale(Locale::Zh)).unwrap();
        assert_eq!(zh.demos[0].id, "person/zh#0");
        assert_eq!(zh.demos[0].real, "李伟");
    }

    #[test]
    fn rejects_missing_and_small_pools() {
        let mut doc: serde_json::Value = serde_json::from_str(BUILTIN_POOLS).unwrap();
        doc["person"].as_object_mut().unwrap().remove("de");
        assert!(matches!(PoolSet::from_json(&doc.to_string()), Err(Error::PoolFormat(_))));

        let mut doc: serde_json::Value = serde_json::from_str(BUILTIN_POOLS).unwrap();
        doc["person"]["de"] = serde_json::json!([{"real": "Hans Müller", "fake": "Karl Schmidt"}]);
        assert!(matches!(PoolSet::from_json(&doc.to_string()), Err(Error::PoolTooSmall { .. })));

        let mut doc: serde_json::Value = serde_json::from_str(BUILTIN_POOLS).unwrap();
        doc["date"]["ymd_dash"][0]["fake"] = serde_json::json!("1998-07-11");
        assert!(matches!(PoolSet::from_json(&doc.to_string()), Err(Error::PoolFormat(_))));
    }

    #[test]
    fn override_pools_can_grow() {
        let mut doc: serde_json::Value = serde_json::from_str(BUILTIN_POOLS).unwrap();
        let en = doc["person"]["en"].as_array_mut().unwrap();
        for i in 0..50 {
            en.push(serde_json::json!({"real": format!("Real Person{i}"), "fake": format!("Fake Person{i}")}));
        }
        let pools = PoolSet::from_json(&doc.to_string()).unwrap();
        assert_eq!(pools.get(Family::Person, PoolKey::Locale(Locale::En)).unwrap().len(), 58);
    }
}
