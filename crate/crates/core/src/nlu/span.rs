use serde::{Deserialize, Serialize};

use crate::model::{Operator, SlotName, Value};

/// Where an annotation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationSource {
    Lexicon,
    Synonym,
    YearPattern,
    PersonAmbiguous,
}

/// A slot value located in an utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub slot: SlotName,
    pub op: Operator,
    pub value: Value,
    /// Character offsets `[start, end)` into the utterance.
    pub span: (usize, usize),
    pub source: AnnotationSource,
}

impl Annotation {
    pub fn len(&self) -> usize {
        self.span.1 - self.span.0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn overlaps(&self, other: &Annotation) -> bool {
        self.span.0 < other.span.1 && other.span.0 < self.span.1
    }

    /// Members of a pair or range group share a span and source and are
    /// resolved together.
    fn groups_with(&self, other: &Annotation) -> bool {
        self.span == other.span
            && self.source == other.source
            && matches!(self.source, AnnotationSource::YearPattern | AnnotationSource::PersonAmbiguous)
    }
}

/// Tie-break between equally long overlapping spans; lower wins.
pub fn slot_priority(slot: SlotName) -> u8 {
    match slot {
        SlotName::Keywords => 0,
        SlotName::Title => 1,
        SlotName::Actors | SlotName::Directors => 2,
        SlotName::Genres => 3,
        _ => 4,
    }
}

/// Drops annotations whose span overlaps a longer (or equally long but
/// higher-priority) one. Grouped annotations are kept or dropped as a unit.
/// Output is ordered by span start, group members in input order.
pub fn resolve_spans(annotations: Vec<Annotation>) -> Vec<Annotation> {
    let mut groups: Vec<Vec<Annotation>> = Vec::new();
    for a in annotations {
        match groups.iter_mut().find(|g| g[0].groups_with(&a)) {
            Some(g) => {
                if !g.contains(&a) {
                    g.push(a)
                }
            }
            None => groups.push(vec![a]),
        }
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&i| {
        let lead = &groups[i][0];
        let prio = groups[i].iter().map(|a| slot_priority(a.slot)).min().unwrap_or(u8::MAX);
        (std::cmp::Reverse(lead.len()), prio, lead.span.0, i)
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let lead = &groups[i][0];
        if kept.iter().all(|&k| !groups[k][0].overlaps(lead)) {
            kept.push(i);
        }
    }
    kept.sort_by_key(|&i| (groups[i][0].span.0, i));
    kept.into_iter().flat_map(|i| groups[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ann(slot: SlotName, value: &str, span: (usize, usize)) -> Annotation {
        Annotation {
            slot,
            op: Operator::Eq,
            value: Value::text(value),
            span,
            source: AnnotationSource::Lexicon,
        }
    }

    #[test]
    fn longer_span_wins() {
        let out = resolve_spans(vec![
            ann(SlotName::Genres, "war", (26, 29)),
            ann(SlotName::Keywords, "civil war", (20, 29)),
        ]);
        assert_eq!(out, vec![ann(SlotName::Keywords, "civil war", (20, 29))]);
    }

    #[test]
    fn disjoint_unchanged() {
        let input = vec![ann(SlotName::Genres, "action", (7, 13)), ann(SlotName::Actors, "tom hanks", (20, 29))];
        assert_eq!(resolve_spans(input.clone()), input);
    }

    #[test]
    fn priority_table_on_identical_span() {
        let slots = [SlotName::Keywords, SlotName::Title, SlotName::Actors, SlotName::Genres];
        for (i, a) in slots.iter().enumerate() {
            for b in &slots[i + 1..] {
                for (x, y) in [(*a, *b), (*b, *a)] {
                    let out = resolve_spans(vec![ann(x, "v", (0, 5)), ann(y, "v", (0, 5))]);
                    assert_eq!(out.len(), 1);
                    assert_eq!(out[0].slot, *a, "{x:?} vs {y:?}");
                }
            }
        }
    }

    #[test]
    fn ambiguous_pair_kept_together() {
        let mut actor = ann(SlotName::Actors, "tom hanks", (0, 9));
        let mut director = ann(SlotName::Directors, "tom hanks", (0, 9));
        actor.source = AnnotationSource::PersonAmbiguous;
        director.source = AnnotationSource::PersonAmbiguous;
        let out = resolve_spans(vec![actor.clone(), director.clone(), ann(SlotName::Genres, "tom", (0, 3))]);
        assert_eq!(out, vec![actor, director]);
    }
}
