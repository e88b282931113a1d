//! Agent act selection.

use std::collections::BTreeSet;

use super::PolicyConfig;
use crate::catalog::Catalog;
use crate::model::{
    AgentStage, Constraint, DialogueAct, DialogueContext, DialogueState, Intent, ItemId, Operator, SlotName,
};

/// Whether a stage change is an edge of the dialogue flow graph.
///
/// Information about an item and feedback on it are only reachable once a
/// recommendation has been made, and a closed conversation can only start
/// over.
pub fn is_flow_edge(from: AgentStage, to: AgentStage) -> bool {
    use AgentStage::*;
    match (from, to) {
        (Greeting | Eliciting, Informing | AwaitingFeedback) => false,
        (Closing, to) => matches!(to, Greeting | Closing),
        _ => true,
    }
}

/// Every edge of the flow graph.
pub fn flow_edges() -> Vec<(AgentStage, AgentStage)> {
    AgentStage::ALL
        .iter()
        .flat_map(|&a| AgentStage::ALL.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| is_flow_edge(a, b))
        .collect()
}

/// First slot in elicitation order that holds no constraint and is not
/// marked as "don't care".
pub fn next_elicit_slot(state: &DialogueState, config: &PolicyConfig) -> Option<SlotName> {
    config
        .elicitation_order
        .iter()
        .copied()
        .find(|&s| !state.info_need.is_constrained(s) && !state.info_need.dont_care.contains(&s))
}

/// Top-ranked matching item that has no feedback in the context.
pub fn recommend(
    state: &DialogueState,
    context: &DialogueContext,
    catalog: &Catalog,
    _config: &PolicyConfig,
) -> Option<ItemId> {
    catalog
        .matching(&state.info_need)
        .find(|item| !context.contains(&item.id))
        .map(|item| item.id.clone())
}

fn features(catalog: &Catalog, id: &str) -> BTreeSet<String> {
    let Some(item) = catalog.item(id) else {
        return BTreeSet::new();
    };
    [SlotName::Genres, SlotName::Keywords]
        .into_iter()
        .flat_map(|slot| {
            item.values(slot)
                .into_iter()
                .filter_map(move |v| v.as_text().map(|t| format!("{}:{t}", slot.as_str())))
        })
        .collect()
}

/// Jaccard similarity of two feature sets; two empty sets score 0.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Matching item most similar to `accepted` over genres and keywords,
/// skipping items with feedback and `accepted` itself. Ties go to the
/// better-ranked item.
pub fn similar_recommendation(
    state: &DialogueState,
    context: &DialogueContext,
    catalog: &Catalog,
    accepted: &str,
) -> Option<ItemId> {
    let target = features(catalog, accepted);
    let mut best: Option<(f64, &str)> = None;
    for item in catalog.matching(&state.info_need) {
        if item.id == accepted || context.contains(&item.id) {
            continue;
        }
        let score = jaccard(&target, &features(catalog, &item.id));
        // ranked iteration: only a strictly better score displaces
        if best.is_none_or(|(b, _)| score > b) {
            best = Some((score, &item.id));
        }
    }
    best.map(|(_, id)| id.to_string())
}

/// Rules fired for a preference update: no matches, keep eliciting, or
/// recommend. `state.match_count` must be current.
pub fn next_agent_acts(
    state: &DialogueState,
    context: &DialogueContext,
    catalog: &Catalog,
    config: &PolicyConfig,
) -> Vec<DialogueAct> {
    let count = state.match_count;
    if count == 0 {
        trace(config, "no_results");
        return vec![DialogueAct::agent(Intent::NoResults).with_count(0)];
    }
    if count > config.result_threshold && state.elicit_count < config.max_elicit_questions {
        if let Some(slot) = next_elicit_slot(state, config) {
            trace(config, "elicit");
            let mut acts = Vec::with_capacity(2);
            if !state.info_need.is_empty() && config.count_disclosure {
                acts.push(DialogueAct::agent(Intent::TooManyResults).with_count(count as u64));
            }
            acts.push(DialogueAct::elicit(slot));
            return acts;
        }
    }
    recommend_or_exhausted(state, context, catalog, config)
}

pub(crate) fn recommend_or_exhausted(
    state: &DialogueState,
    context: &DialogueContext,
    catalog: &Catalog,
    config: &PolicyConfig,
) -> Vec<DialogueAct> {
    match recommend(state, context, catalog, config) {
        Some(id) => {
            trace(config, "recommend");
            vec![DialogueAct::recommend(id)]
        }
        None => exhausted(state, config),
    }
}

pub(crate) fn exhausted(state: &DialogueState, config: &PolicyConfig) -> Vec<DialogueAct> {
    trace(config, "exhausted");
    vec![DialogueAct::agent(Intent::NoResults).with_count(state.match_count as u64)]
}

/// Attribute values of an item as an `Inform` act. Without a slot the act
/// carries the item only and stands for an overview.
pub fn inform(catalog: &Catalog, item: &str, slot: Option<SlotName>) -> DialogueAct {
    let act = DialogueAct::agent(Intent::Inform).with_item(item);
    let (Some(slot), Some(record)) = (slot, catalog.item(item)) else {
        return act;
    };
    let constraints = record
        .values(slot)
        .into_iter()
        .filter_map(|v| Constraint::new(slot, Operator::Eq, v).ok())
        .collect();
    act.with_constraints(constraints)
}

/// Attributes a user can ask about once an item is on the table.
pub fn inquirable_slots() -> [SlotName; 8] {
    [
        SlotName::Genres,
        SlotName::Plot,
        SlotName::Directors,
        SlotName::Actors,
        SlotName::Duration,
        SlotName::Rating,
        SlotName::ReleaseYear,
        SlotName::Keywords,
    ]
}

pub(crate) fn trace(config: &PolicyConfig, rule: &str) {
    if config.trace {
        tracing::debug!(rule, "policy rule fired");
    }
}
