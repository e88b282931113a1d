//! Pattern-based intent detection.

use super::lemma::{lemmatize, Token};
use super::registry::{IntentPattern, PatternRegistry};
use crate::model::{AgentStage, Intent};

/// A pattern that fired, with the tokens it claimed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PatternMatch<'r> {
    pub pattern: &'r IntentPattern,
    pub start: usize,
    pub len: usize,
}

/// Pattern matches applicable at `stage`. Longer phrases claim their tokens
/// first; a phrase overlapping an already claimed token is discarded.
/// The result keeps pattern file order.
pub(crate) fn pattern_matches<'r>(
    tokens: &[Token],
    stage: AgentStage,
    registry: &'r PatternRegistry,
) -> Vec<PatternMatch<'r>> {
    let lemmas: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
    let mut found: Vec<(usize, PatternMatch<'r>)> = Vec::new();
    for (order, pattern) in registry.intents.iter().enumerate() {
        if !pattern.applies(stage) {
            continue;
        }
        for phrase in &pattern.phrases {
            let n = phrase.len();
            if n > lemmas.len() {
                continue;
            }
            for start in 0..=lemmas.len() - n {
                if phrase.iter().zip(&lemmas[start..]).all(|(p, l)| p == l) {
                    found.push((order, PatternMatch { pattern, start, len: n }));
                }
            }
        }
    }
    found.sort_by(|a, b| b.1.len.cmp(&a.1.len).then(a.0.cmp(&b.0)).then(a.1.start.cmp(&b.1.start)));
    let mut claimed = vec![false; lemmas.len()];
    let mut kept = Vec::new();
    for (order, m) in found {
        let range = m.start..m.start + m.len;
        if claimed[range.clone()].iter().any(|c| *c) {
            continue;
        }
        claimed[range].iter_mut().for_each(|c| *c = true);
        kept.push((order, m));
    }
    kept.sort_by_key(|(order, m)| (*order, m.start));
    kept.into_iter().map(|(_, m)| m).collect()
}

/// Best match: stage-gated patterns outrank global ones, then file order.
pub(crate) fn best_match<'r>(matches: &[PatternMatch<'r>]) -> Option<PatternMatch<'r>> {
    matches
        .iter()
        .find(|m| m.pattern.is_gated())
        .or_else(|| matches.first())
        .copied()
}

/// Intent an utterance triggers at `stage` through patterns alone;
/// [`Intent::Unrecognized`] when none applies.
pub fn detect_intent(utterance: &str, stage: AgentStage, registry: &PatternRegistry) -> Intent {
    let tokens = lemmatize(utterance);
    best_match(&pattern_matches(&tokens, stage, registry)).map_or(Intent::Unrecognized, |m| m.pattern.intent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gated_beats_global() {
        let reg = PatternRegistry::bundled();
        assert_eq!(detect_intent("no", AgentStage::Recommending, &reg), Intent::Reject);
        assert_eq!(detect_intent("no", AgentStage::Eliciting, &reg), Intent::Deny);
        assert_eq!(detect_intent("yes", AgentStage::Recommending, &reg), Intent::Accept);
        assert_eq!(detect_intent("yes", AgentStage::AwaitingFeedback, &reg), Intent::Acknowledge);
    }

    #[test]
    fn longest_claims_first() {
        let reg = PatternRegistry::bundled();
        // "no thanks" is claimed whole by reject, not split into deny + acknowledge
        assert_eq!(detect_intent("no thanks", AgentStage::Informing, &reg), Intent::Reject);
        assert_eq!(detect_intent("who directed it?", AgentStage::AwaitingFeedback, &reg), Intent::Inquire);
    }

    #[test]
    fn nothing_matches() {
        let reg = PatternRegistry::bundled();
        assert_eq!(detect_intent("blargh qwerty", AgentStage::Greeting, &reg), Intent::Unrecognized);
    }
}
