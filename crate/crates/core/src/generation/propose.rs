//! Mode routing and the SLM proposal path with validation fallback.

use log::{debug, warn};

use super::backend::{BackendHealth, SlmBackend};
use super::fake::{fake_value, FakeGenState};
use crate::error::{Error, Result};
use crate::locale::{classify_date_format, classify_locale};
use crate::model::{DecisionSource, Label, Mode, RejectionReason, SurrogateDecision};
use crate::prompting::{
    build_prompt, pool_id, sample_demos, validate_response, DemoStrategy, Family, PoolKey, PoolSet, SHOTS,
};

pub const REDACT_FAMILY: &str = "redact";
pub const FAKE_FAMILY: &str = "fake";

/// `[LABEL]`, or `[{prefix}LABEL]` with a configured prefix.
pub fn redact_placeholder(label: Label, prefix: &str) -> String {
    format!("[{prefix}{}]", label.name())
}

/// Labels the hybrid mode sends to the SLM.
pub fn routes_to_slm(label: Label) -> bool {
    Family::of(label).is_some()
}

/// Everything a proposal needs besides the entity itself.
pub struct Proposer<'a> {
    pub pools: &'a PoolSet,
    pub backend: Option<&'a dyn SlmBackend>,
    pub strategy: DemoStrategy,
    pub health: &'a BackendHealth,
    pub placeholder_prefix: &'a str,
}

fn fake_for(label: Label, surface: &str, state: &mut FakeGenState) -> String {
    let format = (label == Label::Date).then(|| classify_date_format(surface));
    fake_value(label, classify_locale(surface), format, state)
}

impl<'a> Proposer<'a> {
    /// The proposer id for the cache key of (`label`, `mode`).
    pub fn family(&self, label: Label, mode: Mode) -> String {
        match mode {
            Mode::Redact => REDACT_FAMILY.into(),
            Mode::Faker => FAKE_FAMILY.into(),
            Mode::Hybrid => match (routes_to_slm(label), self.backend) {
                (true, Some(b)) => b.id().to_string(),
                _ => FAKE_FAMILY.into(),
            },
        }
    }

    /// Routes one entity by mode and label. `surface` is a representative
    /// mention of the entity.
    pub fn dispatch(
        &self,
        label: Label,
        surface: &str,
        mode: Mode,
        state: &mut FakeGenState,
    ) -> Result<SurrogateDecision> {
        let surface = surface.trim();
        match mode {
            Mode::Redact => {
                Ok(SurrogateDecision::plain(redact_placeholder(label, self.placeholder_prefix), DecisionSource::Redact))
            }
            Mode::Faker => Ok(SurrogateDecision::plain(fake_for(label, surface, state), DecisionSource::Fake)),
            Mode::Hybrid if routes_to_slm(label) => self.slm_propose(surface, label, state),
            Mode::Hybrid => Ok(SurrogateDecision::plain(fake_for(label, surface, state), DecisionSource::Fake)),
        }
    }

    /// Classifies, samples demos, prompts the backend and validates. A
    /// rejected or failed completion falls back to a fake value.
    pub fn slm_propose(&self, surface: &str, label: Label, state: &mut FakeGenState) -> Result<SurrogateDecision> {
        let family = Family::of(label).ok_or(Error::NotSlmLabel(label))?;
        let backend = self.backend.ok_or_else(|| Error::UnknownBackend("no SLM backend configured".into()))?;
        let surface = surface.trim();
        let key = family.classify(surface);
        let class = pool_id(family, key);
        let pool = match self.strategy {
            DemoStrategy::RotatingLocale => self.pools.get(family, key),
            DemoStrategy::FixedThree => Some(self.pools.fixed(family)),
        };
        let locale = match key {
            PoolKey::Locale(l) => l,
            _ => classify_locale(surface),
        };
        let fallback = |state: &mut FakeGenState| {
            let format = match key {
                PoolKey::Date(f) => Some(f),
                _ => None,
            };
            fake_value(label, locale, format, state)
        };

        let Some(pool) = pool.filter(|p| p.len() >= SHOTS) else {
            debug!("{class}: pool too small for a {SHOTS}-shot prompt, using a plain fake value");
            let mut d = SurrogateDecision::plain(fallback(state), DecisionSource::Fake);
            d.class = Some(class);
            return Ok(d);
        };
        let demos = match self.strategy {
            DemoStrategy::RotatingLocale => sample_demos(pool, surface)?,
            DemoStrategy::FixedThree => pool.demos.clone(),
        };
        let demos_used: Vec<String> = demos.iter().map(|d| d.id.clone()).collect();

        let outcome = match build_prompt(&demos, surface) {
            Ok(prompt) => match backend.complete(&prompt) {
                Ok(raw) => {
                    self.health.record_success();
                    validate_response(&raw, surface)
                }
                Err(e) => {
                    warn!("backend {} failed on a {class} entity: {e}", backend.id());
                    self.health.record_failure(backend.id())?;
                    Err(RejectionReason::Empty)
                }
            },
            Err(e) => {
                warn!("cannot prompt for a {class} entity: {e}");
                Err(RejectionReason::Empty)
            }
        };

        let decision = match outcome {
            Ok(surrogate) => SurrogateDecision {
                surrogate,
                source: DecisionSource::Slm,
                demos_used,
                rejection_reasons: Vec::new(),
                class: Some(class),
                pool: Some(pool.id()),
            },
            Err(reason) => SurrogateDecision {
                surrogate: fallback(state),
                source: DecisionSource::FallbackFake,
                demos_used,
                rejection_reasons: vec![reason],
                class: Some(class),
                pool: Some(pool.id()),
            },
        };
        Ok(decision)
    }
}
