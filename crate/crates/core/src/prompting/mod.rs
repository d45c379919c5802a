//! Demonstration pools, rotating demo sampling, prompt rendering, response
//! validation and regurgitation analysis.

mod pools;
mod prompt;
mod regurgitation;
mod sampling;
mod validate;

pub use pools::{pool_id, ClosureViolation, Demo, DemoPool, Family, PoolKey, PoolSet};
pub use prompt::{build_prompt, PromptSpec};
pub use regurgitation::{analyze_regurgitation, ClassStats, CopyFlag, CopySide, RegurgitationReport, SideCounts};
pub use sampling::{input_seed, sample_demos, sample_indices, SplitMix64, SHOTS};
pub use validate::validate_response;

use serde::{Deserialize, Serialize};

/// How demonstrations are chosen for each SLM call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DemoStrategy {
    /// Locale-conditioned pool, three demos sampled per input.
    #[default]
    RotatingLocale,
    /// The same three mixed-locale demos for every input.
    FixedThree,
}

impl std::str::FromStr for DemoStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rotating_locale" => Ok(DemoStrategy::RotatingLocale),
            "fixed_three" => Ok(DemoStrategy::FixedThree),
            _ => Err(format!("unknown demo strategy `{s}` (expected rotating_locale or fixed_three)")),
        }
    }
}
