use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::SlotName;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid policy file: {0}")]
    Parse(String),
    #[error("cannot read policy file: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} must be at least 1")]
    Threshold(&'static str),
    #[error("slot {0} listed twice in elicitation_order")]
    DuplicateSlot(SlotName),
    #[error("slot {0} cannot be elicited")]
    NotElicitable(SlotName),
}

/// Tunables of the dialogue policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub result_threshold: usize,
    pub max_elicit_questions: u32,
    pub elicitation_order: Vec<SlotName>,
    pub count_disclosure: bool,
    pub trace: bool,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            result_threshold: 20,
            max_elicit_questions: 5,
            elicitation_order: vec![
                SlotName::Genres,
                SlotName::Keywords,
                SlotName::Actors,
                SlotName::Directors,
                SlotName::ReleaseYear,
            ],
            count_disclosure: true,
            trace: false,
        }
    }
}

impl PolicyConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PolicyConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.result_threshold < 1 {
            return Err(ConfigError::Threshold("result_threshold"));
        }
        if self.max_elicit_questions < 1 {
            return Err(ConfigError::Threshold("max_elicit_questions"));
        }
        let mut seen = BTreeSet::new();
        for &slot in &self.elicitation_order {
            if !(slot.has_lexicon() || slot.is_numeric()) || slot == SlotName::Title {
                return Err(ConfigError::NotElicitable(slot));
            }
            if !seen.insert(slot) {
                return Err(ConfigError::DuplicateSlot(slot));
            }
        }
        Ok(())
    }
}
