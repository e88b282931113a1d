//! Lexicon matching over n-grams and per-annotation cue attachment.

use std::collections::HashMap;

use super::lemma::{lemma_key, Token};
use super::registry::{any_phrase, phrase_ending_at, Cues, PatternRegistry};
use super::span::{resolve_spans, Annotation, AnnotationSource};
use super::years::year_annotations;
use crate::catalog::Catalog;
use crate::model::{Operator, SlotName, Value};

/// Longest n-gram looked up in the lexicons.
pub const MAX_NGRAM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    slot: SlotName,
    value: String,
    source: AnnotationSource,
}

/// Lemma key → lexicon entries, built once per catalog.
#[derive(Debug, Clone, Default)]
pub struct LexiconIndex {
    entries: HashMap<String, Vec<Entry>>,
}

impl LexiconIndex {
    pub fn new(catalog: &Catalog) -> Self {
        let mut index = LexiconIndex::default();
        for slot in SlotName::LEXICON {
            for value in catalog.lexicon(slot).expect("lexicon slot") {
                index.add(slot, value, value, AnnotationSource::Lexicon);
            }
        }
        for (genre, syns) in catalog.genre_synonyms() {
            for syn in syns {
                index.add(SlotName::Genres, syn, genre, AnnotationSource::Synonym);
            }
        }
        index
    }

    fn add(&mut self, slot: SlotName, phrase: &str, value: &str, source: AnnotationSource) {
        let key = lemma_key(phrase);
        if key.is_empty() {
            return;
        }
        let list = self.entries.entry(key).or_default();
        // a genre reachable both directly and through a synonym keeps the direct entry
        if !list.iter().any(|e| e.slot == slot && e.value == value) {
            list.push(Entry {
                slot,
                value: value.to_string(),
                source,
            });
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Removal strength found in an annotation's clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Removal {
    None,
    Weak,
    Strong,
}

/// Token index range `[from, to)` of the clause around an annotation.
struct Clause {
    from: usize,
    to: usize,
}

fn token_range(tokens: &[Token], span: (usize, usize)) -> (usize, usize) {
    let first = tokens.iter().position(|t| t.start >= span.0).unwrap_or(tokens.len());
    let last = tokens.iter().rposition(|t| t.end <= span.1).map_or(first, |i| i + 1);
    (first, last.max(first))
}

struct Context<'a> {
    utterance: &'a [char],
    tokens: &'a [Token],
    lemmas: Vec<&'a str>,
    /// Tokens inside a resolved annotation are not cue material.
    covered: Vec<bool>,
    cues: &'a Cues,
}

impl<'a> Context<'a> {
    /// Clause boundary between token `i` and `i + 1`.
    fn gap_breaks(&self, i: usize) -> bool {
        if self.covered[i] && self.covered.get(i + 1).copied().unwrap_or(false) {
            return false;
        }
        let from = self.tokens[i].end;
        let to = self.tokens.get(i + 1).map_or(self.utterance.len(), |t| t.start);
        self.utterance[from..to].iter().any(|c| matches!(c, ',' | ';' | '.' | '!' | '?' | ':' | '(' | ')'))
    }

    fn is_coordinator(&self, i: usize) -> bool {
        !self.covered[i] && self.cues.coordinator.iter().any(|p| p.len() == 1 && p[0] == self.lemmas[i])
    }

    fn clause(&self, first: usize, last: usize) -> Clause {
        let mut from = first;
        while from > 0 && !self.gap_breaks(from - 1) && !self.is_coordinator(from - 1) {
            from -= 1;
        }
        let mut to = last;
        while to < self.tokens.len() && !self.is_coordinator(to) && (to == 0 || !self.gap_breaks(to - 1)) {
            to += 1;
        }
        Clause { from, to }
    }

    /// Lemmas with covered tokens blanked out so cues never match inside
    /// another annotation.
    fn cue_lemmas(&self) -> Vec<&'a str> {
        self.lemmas
            .iter()
            .zip(&self.covered)
            .map(|(l, c)| if *c { "\u{0}" } else { *l })
            .collect()
    }
}

/// Role indicated by the nearest cue preceding `first` in the clause.
fn role_cue(lemmas: &[&str], cues: &Cues, clause_from: usize, first: usize) -> Option<SlotName> {
    (clause_from..=first).rev().find_map(|end| {
        if phrase_ending_at(lemmas, &cues.director, clause_from, end) {
            Some(SlotName::Directors)
        } else if phrase_ending_at(lemmas, &cues.actor, clause_from, end) {
            Some(SlotName::Actors)
        } else {
            None
        }
    })
}

fn title_cued(lemmas: &[&str], cues: &Cues, first: usize) -> bool {
    phrase_ending_at(lemmas, &cues.title, 0, first)
}

fn negate(op: Operator) -> Operator {
    match op {
        Operator::Eq => Operator::Neq,
        Operator::Neq => Operator::Eq,
        Operator::Lt => Operator::Geq,
        Operator::Geq => Operator::Lt,
        Operator::Gt => Operator::Leq,
        Operator::Leq => Operator::Gt,
    }
}

/// Raw lexicon and year candidates before span resolution.
fn candidates(tokens: &[Token], index: &LexiconIndex, registry: &PatternRegistry) -> Vec<Annotation> {
    let lemmas: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
    let mut out = Vec::new();
    for n in (1..=MAX_NGRAM.min(tokens.len())).rev() {
        for start in 0..=tokens.len() - n {
            let key = lemmas[start..start + n].join(" ");
            let Some(entries) = index.entries.get(&key) else {
                continue;
            };
            let span = (tokens[start].start, tokens[start + n - 1].end);
            let people: Vec<&Entry> = entries
                .iter()
                .filter(|e| matches!(e.slot, SlotName::Actors | SlotName::Directors))
                .collect();
            let ambiguous = people.len() > 1;
            for e in entries {
                if e.slot == SlotName::Title && n < 2 && !title_cued(&lemmas, &registry.cues, start) {
                    continue;
                }
                let source = if ambiguous && people.contains(&e) {
                    AnnotationSource::PersonAmbiguous
                } else {
                    e.source
                };
                out.push(Annotation {
                    slot: e.slot,
                    op: Operator::Eq,
                    value: Value::Text(e.value.clone()),
                    span,
                    source,
                });
            }
        }
    }
    out.extend(year_annotations(tokens, &registry.years));
    out
}

/// A resolved annotation with the cues found in its clause.
#[derive(Debug, Clone)]
pub(crate) struct Mention {
    /// Role applied; operator as written, before negation.
    pub annotation: Annotation,
    pub negated: bool,
    pub removal: Removal,
}

impl Mention {
    /// The annotation with negation applied. A negated two-sided range has no
    /// single-constraint complement, so ranges keep their operators.
    pub fn polar(&self, in_range: bool) -> Annotation {
        let mut a = self.annotation.clone();
        if self.negated && !in_range {
            a.op = negate(a.op);
        }
        a
    }
}

/// Resolved annotations with role cues applied, in utterance order.
pub(crate) fn annotate(
    utterance: &str,
    tokens: &[Token],
    index: &LexiconIndex,
    registry: &PatternRegistry,
) -> Vec<Mention> {
    let resolved = resolve_spans(candidates(tokens, index, registry));
    if resolved.is_empty() {
        return Vec::new();
    }
    let chars: Vec<char> = utterance.chars().collect();
    let mut covered = vec![false; tokens.len()];
    for a in &resolved {
        let (first, last) = token_range(tokens, a.span);
        covered[first..last].iter_mut().for_each(|c| *c = true);
    }
    let ctx = Context {
        utterance: &chars,
        tokens,
        lemmas: tokens.iter().map(|t| t.lemma.as_str()).collect(),
        covered,
        cues: &registry.cues,
    };
    let cue_lemmas = ctx.cue_lemmas();
    let cues = &registry.cues;

    let mut out: Vec<Mention> = Vec::new();
    let mut i = 0;
    while i < resolved.len() {
        let a = &resolved[i];
        let (first, last) = token_range(tokens, a.span);
        let clause = ctx.clause(first, last);
        let removal = if any_phrase(&cue_lemmas, &cues.removal, clause.from, clause.to) {
            Removal::Strong
        } else if any_phrase(&cue_lemmas, &cues.weak_removal, clause.from, first) {
            Removal::Weak
        } else {
            Removal::None
        };
        let negated = any_phrase(&cue_lemmas, &cues.negation, clause.from, first);

        // Persons: a role cue overrides lexicon membership.
        let group_end = resolved[i..]
            .iter()
            .position(|b| b.span != a.span || b.source != a.source)
            .map_or(resolved.len(), |k| i + k);
        let mut group: Vec<Annotation> = resolved[i..group_end].to_vec();
        if matches!(a.slot, SlotName::Actors | SlotName::Directors) {
            if let Some(role) = role_cue(&cue_lemmas, cues, clause.from, first) {
                group = vec![Annotation {
                    slot: role,
                    source: AnnotationSource::Lexicon,
                    ..a.clone()
                }];
            }
        }
        for g in group {
            out.push(Mention {
                annotation: g,
                negated,
                removal,
            });
        }
        i = group_end;
    }
    out
}
