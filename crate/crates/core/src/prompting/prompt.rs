use serde::{Deserialize, Serialize};

use super::pools::Demo;
use super::sampling::SHOTS;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub demos: Vec<Demo>,
    pub input: String,
    pub rendered: String,
}

/// Renders the three-shot `Real:`/`Fake:` completion prompt. The output
/// ends with `Fake:` and no trailing newline.
pub fn build_prompt(demos: &[Demo], input: &str) -> Result<PromptSpec> {
    if demos.len() != SHOTS {
        return Err(Error::InvalidInput(format!("expected {SHOTS} demos, got {}", demos.len())));
    }
    let input = input.trim();
    if input.contains(['\n', '\r']) {
        return Err(Error::InvalidInput("entity spans a line break".into()));
    }
    let mut rendered = String::new();
    for demo in demos {
        rendered.push_str("Real: ");
        rendered.push_str(&demo.real);
        rendered.push_str("\nFake: ");
        rendered.push_str(&demo.fake);
        rendered.push('\n');
    }
    rendered.push_str("Real: ");
    rendered.push_str(input);
    rendered.push_str("\nFake:");
    Ok(PromptSpec { demos: demos.to_vec(), input: input.to_string(), rendered })
}
