//! Rule-based natural language understanding.
//!
//! Utterances are lemmatized, matched against intent patterns and slot
//! lexicons, and turned into user dialogue acts. Stage-gated patterns
//! (feedback on a recommendation, questions about it) are tried first,
//! then slot annotations, then a "don't care" answer to a pending
//! question, then global patterns such as greetings.

mod intent;
mod lemma;
mod registry;
mod slots;
mod span;
mod years;

pub use intent::detect_intent;
pub use lemma::{lemma_key, lemma_of, lemmatize, Token};
pub use registry::{Cues, IntentPattern, PatternRegistry, Phrase, RegistryError, YearConfig};
pub use slots::{LexiconIndex, MAX_NGRAM};
pub use span::{resolve_spans, slot_priority, Annotation, AnnotationSource};
pub use years::parse_year_expression;

use intent::{best_match, pattern_matches, PatternMatch};
use registry::any_phrase;
use slots::{annotate, Mention, Removal};

use crate::catalog::Catalog;
use crate::model::{AgentStage, Constraint, DialogueAct, DialogueState, FeedbackLabel, Intent};

/// Gated matches this short yield to slot annotations in the same
/// utterance, so "no horror" while a movie is on screen is a preference.
const SHORT_GATED: usize = 2;

/// Parser bound to one catalog's lexicons.
#[derive(Debug, Clone)]
pub struct Nlu {
    index: LexiconIndex,
    registry: PatternRegistry,
}

impl Nlu {
    pub fn new(catalog: &Catalog, registry: PatternRegistry) -> Self {
        Nlu {
            index: LexiconIndex::new(catalog),
            registry,
        }
    }

    pub fn registry(&self) -> &PatternRegistry {
        &self.registry
    }

    /// Resolved slot annotations with role and negation cues applied.
    pub fn fill_slots(&self, utterance: &str) -> Vec<Annotation> {
        let tokens = lemmatize(utterance);
        let mentions = annotate(utterance, &tokens, &self.index, &self.registry);
        mentions.iter().map(|m| m.polar(in_range(m, &mentions))).collect()
    }

    pub fn detect_intent(&self, utterance: &str, stage: AgentStage) -> Intent {
        detect_intent(utterance, stage, &self.registry)
    }

    /// User acts for an utterance in the given state. Never empty: an
    /// utterance that yields nothing becomes a single `Unrecognized` act.
    pub fn parse(&self, utterance: &str, state: &DialogueState) -> Vec<DialogueAct> {
        let stage = state.agent_stage;
        let tokens = lemmatize(utterance);
        let matches = pattern_matches(&tokens, stage, &self.registry);
        let mentions = annotate(utterance, &tokens, &self.index, &self.registry);

        if let Some(m) = matches.iter().find(|m| m.pattern.is_gated()) {
            if mentions.is_empty() || m.len > SHORT_GATED {
                return vec![gated_act(m, state)];
            }
        }
        if !mentions.is_empty() {
            let acts = preference_acts(&mentions, state);
            if !acts.is_empty() {
                return acts;
            }
        }
        if stage == AgentStage::Eliciting {
            if let Some(slot) = state.pending_elicit() {
                let lemmas: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
                if any_phrase(&lemmas, &self.registry.cues.dont_care, 0, lemmas.len()) {
                    return vec![DialogueAct::reveal(vec![Constraint::dont_care(slot)])];
                }
            }
        }
        match best_match(&matches) {
            Some(m) => vec![gated_act(&m, state)],
            None => vec![DialogueAct::user(Intent::Unrecognized)],
        }
    }
}

fn gated_act(m: &PatternMatch<'_>, state: &DialogueState) -> DialogueAct {
    let p = m.pattern;
    let mut act = match p.intent {
        Intent::Inquire => DialogueAct::inquire(p.slot),
        Intent::Reject => DialogueAct::user(Intent::Reject).with_feedback(p.feedback.unwrap_or(FeedbackLabel::Rejected)),
        other => DialogueAct::user(other),
    };
    if matches!(p.intent, Intent::Accept | Intent::Reject | Intent::Inquire) {
        if let Some(item) = &state.current_recommendation {
            act = act.with_item(item.clone());
        }
    }
    act
}

/// Members of a two-sided year range share one span.
fn in_range(m: &Mention, all: &[Mention]) -> bool {
    m.annotation.source == AnnotationSource::YearPattern
        && all
            .iter()
            .filter(|o| o.annotation.source == AnnotationSource::YearPattern && o.annotation.span == m.annotation.span)
            .count()
            > 1
}

/// Reveal and removal acts, ordered by the first mention feeding each.
fn preference_acts(mentions: &[Mention], state: &DialogueState) -> Vec<DialogueAct> {
    let mut reveal: Vec<Constraint> = Vec::new();
    let mut remove: Vec<Constraint> = Vec::new();
    let mut remove_first = None;
    for m in mentions {
        let a = &m.annotation;
        let removing = match m.removal {
            Removal::Strong => true,
            Removal::Weak => state.info_need.mentions(a.slot, &a.value),
            Removal::None => false,
        };
        let ann = if removing { a.clone() } else { m.polar(in_range(m, mentions)) };
        let Ok(c) = Constraint::new(ann.slot, ann.op, ann.value) else {
            continue;
        };
        if removing {
            if remove_first.is_none() {
                remove_first = Some(reveal.is_empty());
            }
            if !remove.contains(&c) {
                remove.push(c);
            }
        } else if !reveal.contains(&c) {
            reveal.push(c);
        }
    }
    let mut acts = Vec::new();
    let reveal_act = (!reveal.is_empty()).then(|| DialogueAct::reveal(reveal));
    let remove_act = (!remove.is_empty()).then(|| DialogueAct::remove(remove));
    if remove_first == Some(true) {
        acts.extend(remove_act);
        acts.extend(reveal_act);
    } else {
        acts.extend(reveal_act);
        acts.extend(remove_act);
    }
    acts
}
