//! Dialogue state tracking and policy.
//!
//! [`update_state`] runs one turn: user acts update the information need and
//! the feedback context, the match set is recomputed against the catalog,
//! and the policy picks the agent's acts. It is a pure function of its
//! inputs.

mod config;
mod policy;

pub use config::{ConfigError, PolicyConfig};
pub use policy::{
    flow_edges, inquirable_slots, inform, is_flow_edge, jaccard, next_agent_acts, next_elicit_slot, recommend,
    similar_recommendation,
};

use policy::{exhausted, recommend_or_exhausted, trace};

use crate::catalog::Catalog;
use crate::model::{
    apply_user_act, restart, AgentStage, Author, Constraint, DialogueAct, DialogueContext, DialogueState,
    FeedbackLabel, Intent,
};

/// Result of one turn.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnOutcome {
    pub agent_acts: Vec<DialogueAct>,
    pub new_state: DialogueState,
    pub new_context: DialogueContext,
}

/// Opening acts of a new conversation.
pub fn welcome() -> Vec<DialogueAct> {
    vec![DialogueAct::agent(Intent::Welcome)]
}

/// State of a conversation that has just been opened with [`welcome`].
pub fn initial_state(session_id: impl Into<String>, catalog: &Catalog) -> DialogueState {
    let mut st = DialogueState::new(session_id);
    refresh_matches(&mut st, catalog);
    st.last_agent_acts = welcome();
    st
}

/// Applies the user's acts for one turn and chooses the agent's response.
pub fn update_state(
    state: &DialogueState,
    context: &DialogueContext,
    user_acts: &[DialogueAct],
    catalog: &Catalog,
    config: &PolicyConfig,
) -> TurnOutcome {
    let mut st = state.clone();
    let mut dc = context.clone();
    st.last_user_acts = user_acts.to_vec();

    let malformed = user_acts.is_empty()
        || user_acts.iter().any(|a| a.author != Author::User || a.validate().is_err());
    let has = |intent: Intent| user_acts.iter().any(|a| a.intent == intent);

    let mut new_elicits = 0;
    let acts = if malformed {
        trace(config, "malformed");
        cant_help(&st)
    } else if st.is_closed() {
        if has(Intent::Restart) || has(Intent::Hi) {
            (st, dc) = restarted(&st, catalog);
            welcome()
        } else {
            vec![DialogueAct::agent(Intent::Bye)]
        }
    } else if has(Intent::Bye) {
        trace(config, "bye");
        vec![DialogueAct::agent(Intent::Bye)]
    } else if has(Intent::Restart) {
        trace(config, "restart");
        (st, dc) = restarted(&st, catalog);
        welcome()
    } else {
        // (i) preferences and feedback
        let mut prefs_changed = false;
        let mut failed = false;
        for act in user_acts {
            match act.intent {
                Intent::Reveal | Intent::RemovePreference => match apply_user_act(&st.info_need, act) {
                    Ok(need) => {
                        st.info_need = need;
                        prefs_changed = true;
                    }
                    Err(_) => failed = true,
                },
                Intent::Deny if st.agent_stage == AgentStage::Eliciting => {
                    if let Some(slot) = st.pending_elicit() {
                        if st.info_need.insert(Constraint::dont_care(slot)).is_ok() {
                            prefs_changed = true;
                        }
                    }
                }
                Intent::Accept | Intent::Reject | Intent::Inquire => {
                    if let Some(item) = st.current_recommendation.clone() {
                        let label = match act.intent {
                            Intent::Accept => FeedbackLabel::Accepted,
                            Intent::Reject => act.feedback.unwrap_or(FeedbackLabel::Rejected),
                            _ => FeedbackLabel::Inquired,
                        };
                        if label != FeedbackLabel::Inquired || !dc.labels(&item).contains(&label) {
                            dc.record(&item, label);
                        }
                        if let Some(slot) = act.asked_slot() {
                            st.inquired_attributes.insert(slot);
                        }
                    }
                }
                _ => {}
            }
        }
        // (ii) match set
        refresh_matches(&mut st, catalog);

        // (iii) policy
        let lead = user_acts.last().map(|a| a.intent).unwrap_or(Intent::Unrecognized);
        let current = st.current_recommendation.clone();
        let mut fresh = false;
        let acts = if failed {
            trace(config, "invalid_preference");
            cant_help(&st)
        } else if prefs_changed {
            fresh = true;
            next_agent_acts(&st, &dc, catalog, config)
        } else {
            match (lead, current) {
                (Intent::Hi, _) if st.agent_stage == AgentStage::Greeting => {
                    fresh = true;
                    let mut acts = welcome();
                    acts.extend(next_agent_acts(&st, &dc, catalog, config));
                    acts
                }
                (Intent::Inquire, Some(item)) => {
                    trace(config, "inform");
                    let slot = user_acts.last().and_then(DialogueAct::asked_slot);
                    vec![inform(catalog, &item, slot)]
                }
                (Intent::Accept, Some(item)) => {
                    trace(config, "acknowledge_accept");
                    vec![DialogueAct::agent(Intent::Acknowledge).with_item(item)]
                }
                (Intent::Reject, Some(_)) => recommend_or_exhausted(&st, &dc, catalog, config),
                (Intent::ContinueRecommendation, Some(item)) => continue_from(&st, &dc, catalog, config, &item),
                (Intent::Acknowledge, Some(item)) if st.agent_stage == AgentStage::AwaitingFeedback => {
                    continue_from(&st, &dc, catalog, config, &item)
                }
                _ => {
                    trace(config, "cant_help");
                    cant_help(&st)
                }
            }
        };
        // A re-asked question from cant_help is not counted.
        if fresh {
            new_elicits = acts.iter().filter(|a| a.intent == Intent::Elicit).count() as u32;
        }
        acts
    };

    st.elicit_count += new_elicits;
    apply_agent_acts(&mut st, &acts);
    TurnOutcome {
        agent_acts: acts,
        new_state: st,
        new_context: dc,
    }
}

fn restarted(state: &DialogueState, catalog: &Catalog) -> (DialogueState, DialogueContext) {
    let (mut st, dc) = restart(state);
    st.last_user_acts = state.last_user_acts.clone();
    refresh_matches(&mut st, catalog);
    (st, dc)
}

fn refresh_matches(st: &mut DialogueState, catalog: &Catalog) {
    st.match_count = catalog.count_items(&st.info_need);
    st.matching_items = catalog
        .matching(&st.info_need)
        .take(DialogueState::MATCH_CAP)
        .map(|i| i.id.clone())
        .collect();
}

fn continue_from(
    st: &DialogueState,
    dc: &DialogueContext,
    catalog: &Catalog,
    config: &PolicyConfig,
    item: &str,
) -> Vec<DialogueAct> {
    trace(config, "similar");
    match similar_recommendation(st, dc, catalog, item) {
        Some(id) => vec![DialogueAct::recommend(id)],
        None => exhausted(st, config),
    }
}

/// `CantHelp`, repeating a pending question so the user can still answer it.
fn cant_help(st: &DialogueState) -> Vec<DialogueAct> {
    let mut acts = vec![DialogueAct::agent(Intent::CantHelp)];
    if st.agent_stage == AgentStage::Eliciting {
        if let Some(slot) = st.pending_elicit() {
            if !st.info_need.is_constrained(slot) && !st.info_need.dont_care.contains(&slot) {
                acts.push(DialogueAct::elicit(slot));
            }
        }
    }
    acts
}

/// Stage, recommendation and recent-act bookkeeping for the agent's turn.
fn apply_agent_acts(st: &mut DialogueState, acts: &[DialogueAct]) {
    for act in acts {
        if let Some(stage) = AgentStage::after(act.intent) {
            st.agent_stage = stage;
        }
        if act.intent == Intent::Recommend {
            st.current_recommendation = act.item.clone();
            st.inquired_attributes.clear();
        }
    }
    if !st.agent_stage.has_recommendation() {
        st.current_recommendation = None;
        st.inquired_attributes.clear();
    }
    st.last_agent_acts = acts.to_vec();
}
