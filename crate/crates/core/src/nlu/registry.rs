use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;

use super::lemma::lemmatize;
use crate::model::{AgentStage, Author, FeedbackLabel, Intent, SlotName};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("invalid pattern file: {0}")]
    Parse(String),
    #[error("intent {0} cannot be triggered by user input")]
    NotUserIntent(Intent),
    #[error("no pattern triggers intent {0}")]
    Unreachable(Intent),
    #[error("cue list `{0}` is empty")]
    EmptyCues(&'static str),
    #[error("pattern `{0}` lemmatizes to nothing")]
    EmptyPattern(String),
}

/// A lemmatized phrase.
pub type Phrase = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntentPattern {
    pub intent: Intent,
    /// Empty means the pattern applies at every stage.
    pub stages: Vec<AgentStage>,
    pub slot: Option<SlotName>,
    pub feedback: Option<FeedbackLabel>,
    pub phrases: Vec<Phrase>,
}

impl IntentPattern {
    pub fn is_gated(&self) -> bool {
        !self.stages.is_empty()
    }

    pub fn applies(&self, stage: AgentStage) -> bool {
        self.stages.is_empty() || self.stages.contains(&stage)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cues {
    pub negation: Vec<Phrase>,
    pub removal: Vec<Phrase>,
    pub weak_removal: Vec<Phrase>,
    pub director: Vec<Phrase>,
    pub actor: Vec<Phrase>,
    pub title: Vec<Phrase>,
    pub dont_care: Vec<Phrase>,
    pub coordinator: Vec<Phrase>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearConfig {
    pub bare_decade_century: i64,
    pub before: Vec<Phrase>,
    pub after: Vec<Phrase>,
    pub since: Vec<Phrase>,
    pub range_start: Vec<Phrase>,
    pub range_join: Vec<Phrase>,
}

/// Intent trigger patterns plus the cue phrases used by slot filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRegistry {
    pub intents: Vec<IntentPattern>,
    pub cues: Cues,
    pub years: YearConfig,
}

#[derive(Deserialize)]
struct RawRegistry {
    cues: RawCues,
    years: RawYears,
    #[serde(default)]
    intents: Vec<RawIntent>,
}

#[derive(Deserialize)]
struct RawCues {
    negation: Vec<String>,
    removal: Vec<String>,
    #[serde(default)]
    weak_removal: Vec<String>,
    director: Vec<String>,
    actor: Vec<String>,
    title: Vec<String>,
    dont_care: Vec<String>,
    coordinator: Vec<String>,
}

#[derive(Deserialize)]
struct RawYears {
    #[serde(default = "default_century")]
    bare_decade_century: i64,
    before: Vec<String>,
    after: Vec<String>,
    #[serde(default)]
    since: Vec<String>,
    #[serde(default)]
    range_start: Vec<String>,
    #[serde(default)]
    range_join: Vec<String>,
}

fn default_century() -> i64 {
    1900
}

#[derive(Deserialize)]
struct RawIntent {
    intent: Intent,
    #[serde(default)]
    stages: Vec<AgentStage>,
    slot: Option<SlotName>,
    feedback: Option<FeedbackLabel>,
    patterns: Vec<String>,
}

fn phrases(raw: &[String]) -> Result<Vec<Phrase>, RegistryError> {
    raw.iter()
        .map(|p| {
            let phrase: Phrase = lemmatize(p).into_iter().map(|t| t.lemma).collect();
            if phrase.is_empty() {
                Err(RegistryError::EmptyPattern(p.clone()))
            } else {
                Ok(phrase)
            }
        })
        .collect()
}

fn non_empty(name: &'static str, raw: &[String]) -> Result<Vec<Phrase>, RegistryError> {
    if raw.is_empty() {
        return Err(RegistryError::EmptyCues(name));
    }
    phrases(raw)
}

/// Intents that must be reachable through a pattern; reveal and removal are
/// driven by slot annotations instead.
const PATTERN_INTENTS: [Intent; 9] = [
    Intent::Inquire,
    Intent::Accept,
    Intent::Reject,
    Intent::ContinueRecommendation,
    Intent::Hi,
    Intent::Acknowledge,
    Intent::Deny,
    Intent::Bye,
    Intent::Restart,
];

impl PatternRegistry {
    pub fn from_toml(text: &str) -> Result<Self, RegistryError> {
        let raw: RawRegistry = toml::from_str(text).map_err(|e| RegistryError::Parse(e.to_string()))?;
        let mut intents = Vec::with_capacity(raw.intents.len());
        for r in raw.intents {
            if !r.intent.allowed_for(Author::User) || r.intent == Intent::Unrecognized {
                return Err(RegistryError::NotUserIntent(r.intent));
            }
            intents.push(IntentPattern {
                intent: r.intent,
                stages: r.stages,
                slot: r.slot,
                feedback: r.feedback,
                phrases: phrases(&r.patterns)?,
            });
        }
        let covered: BTreeSet<&str> = intents
            .iter()
            .filter(|p| !p.phrases.is_empty())
            .map(|p| p.intent.as_str())
            .collect();
        if let Some(missing) = PATTERN_INTENTS.iter().find(|i| !covered.contains(i.as_str())) {
            return Err(RegistryError::Unreachable(*missing));
        }
        let c = raw.cues;
        let y = raw.years;
        Ok(PatternRegistry {
            intents,
            cues: Cues {
                negation: non_empty("negation", &c.negation)?,
                removal: non_empty("removal", &c.removal)?,
                weak_removal: phrases(&c.weak_removal)?,
                director: non_empty("director", &c.director)?,
                actor: non_empty("actor", &c.actor)?,
                title: non_empty("title", &c.title)?,
                dont_care: non_empty("dont_care", &c.dont_care)?,
                coordinator: non_empty("coordinator", &c.coordinator)?,
            },
            years: YearConfig {
                bare_decade_century: y.bare_decade_century,
                before: non_empty("before", &y.before)?,
                after: non_empty("after", &y.after)?,
                since: phrases(&y.since)?,
                range_start: phrases(&y.range_start)?,
                range_join: phrases(&y.range_join)?,
            },
        })
    }

    pub fn bundled() -> Self {
        Self::from_toml(include_str!("../../data/patterns.toml")).expect("bundled pattern registry is valid")
    }
}

impl Default for YearConfig {
    fn default() -> Self {
        PatternRegistry::bundled().years
    }
}

/// Start index of the first occurrence of `phrase` inside `lemmas[from..to]`.
pub(crate) fn find_phrase(lemmas: &[&str], phrase: &[String], from: usize, to: usize) -> Option<usize> {
    let to = to.min(lemmas.len());
    if phrase.is_empty() || to < from + phrase.len() {
        return None;
    }
    (from..=to - phrase.len()).find(|&i| phrase.iter().zip(&lemmas[i..]).all(|(p, l)| p == l))
}

/// Whether any phrase occurs inside `lemmas[from..to]`.
pub(crate) fn any_phrase(lemmas: &[&str], phrases: &[Phrase], from: usize, to: usize) -> bool {
    phrases.iter().any(|p| find_phrase(lemmas, p, from, to).is_some())
}

/// Whether some phrase ends exactly at `end` (exclusive) and starts at or
/// after `floor`.
pub(crate) fn phrase_ending_at(lemmas: &[&str], phrases: &[Phrase], floor: usize, end: usize) -> bool {
    phrases.iter().any(|p| {
        end >= p.len() && end - p.len() >= floor && p.iter().zip(&lemmas[end - p.len()..end]).all(|(a, b)| a == b)
    })
}
