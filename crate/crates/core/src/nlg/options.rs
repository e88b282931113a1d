use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::display_value;
use crate::catalog::Catalog;
use crate::manager::inquirable_slots;
use crate::model::{
    AgentStage, Constraint, DialogueAct, DialogueContext, DialogueState, FeedbackLabel, InformationNeed, Intent,
    SlotName, Value,
};

/// A button offered to the user. Pressing it sends `payload` as the user's
/// act, bypassing the parser.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ButtonSpec {
    pub label: String,
    pub payload: DialogueAct,
}

impl ButtonSpec {
    fn new(label: impl Into<String>, payload: DialogueAct) -> Self {
        ButtonSpec {
            label: label.into(),
            payload,
        }
    }
}

pub const ACCEPT_LABEL: &str = "I like this recommendation.";
pub const WATCHED_LABEL: &str = "I have already seen it.";
pub const DONT_LIKE_LABEL: &str = "I don't like it.";
pub const MORE_INFO_LABEL: &str = "Tell me more about this movie.";
pub const CONTINUE_LABEL: &str = "I would like a similar recommendation.";
pub const RESTART_LABEL: &str = "Restart";
pub const QUIT_LABEL: &str = "Quit";
pub const DONT_CARE_LABEL: &str = "I don't care";

fn attribute_label(slot: SlotName) -> String {
    let label = slot.label();
    let mut chars = label.chars();
    chars
        .next()
        .map(|c| c.to_uppercase().chain(chars).collect())
        .unwrap_or_default()
}

fn remove_button(catalog: &Catalog, c: Constraint) -> ButtonSpec {
    let value = display_value(catalog, c.slot, &c.value);
    let shown = match c.op {
        crate::model::Operator::Eq => value,
        op => format!("{} {value}", op.symbol()),
    };
    ButtonSpec::new(format!("Remove {}: {shown}", c.slot.label()), DialogueAct::remove(vec![c]))
}

/// Text values held by more than one slot, e.g. a name taken both as actor
/// and as director.
fn ambiguous(need: &InformationNeed) -> Vec<Constraint> {
    let mut out = Vec::new();
    for c in need.iter() {
        let Value::Text(v) = &c.value else { continue };
        let shared = need
            .constraints
            .iter()
            .any(|(slot, list)| *slot != c.slot && list.iter().any(|sc| sc.value.as_text() == Some(v)));
        if shared {
            out.push(c);
        }
    }
    out
}

fn feedback_buttons(item: Option<&str>) -> Vec<ButtonSpec> {
    let with_item = |act: DialogueAct| match item {
        Some(id) => act.with_item(id),
        None => act,
    };
    vec![
        ButtonSpec::new(ACCEPT_LABEL, with_item(DialogueAct::user(Intent::Accept))),
        ButtonSpec::new(
            WATCHED_LABEL,
            with_item(DialogueAct::user(Intent::Reject).with_feedback(FeedbackLabel::Watched)),
        ),
        ButtonSpec::new(
            DONT_LIKE_LABEL,
            with_item(DialogueAct::user(Intent::Reject).with_feedback(FeedbackLabel::DontLike)),
        ),
    ]
}

fn continue_button() -> ButtonSpec {
    ButtonSpec::new(CONTINUE_LABEL, DialogueAct::user(Intent::ContinueRecommendation))
}

fn restart_button() -> ButtonSpec {
    ButtonSpec::new(RESTART_LABEL, DialogueAct::user(Intent::Restart))
}

/// Buttons for the turn the agent just produced.
///
/// Ambiguous preferences get one removal button per slot involved. The rest
/// depends on the stage: feedback and a single "tell me more" button after
/// a recommendation; one button per attribute not yet asked about while
/// informing; continue, restart or quit after an accept; removal and
/// restart when nothing matches; a "don't care" answer to a question.
pub fn options_for(state: &DialogueState, _context: &DialogueContext, catalog: &Catalog) -> Vec<ButtonSpec> {
    let mut out: Vec<ButtonSpec> = ambiguous(&state.info_need)
        .into_iter()
        .map(|c| remove_button(catalog, c))
        .collect();
    let item = state.current_recommendation.as_deref();
    let last = |intent: Intent| state.last_agent_acts.iter().any(|a| a.intent == intent);

    match state.agent_stage {
        AgentStage::Recommending => {
            out.extend(feedback_buttons(item));
            let mut more = DialogueAct::inquire(None);
            if let Some(id) = item {
                more = more.with_item(id);
            }
            out.push(ButtonSpec::new(MORE_INFO_LABEL, more));
        }
        AgentStage::Informing => {
            for slot in inquirable_slots() {
                if state.inquired_attributes.contains(&slot) {
                    continue;
                }
                let mut act = DialogueAct::inquire(Some(slot));
                if let Some(id) = item {
                    act = act.with_item(id);
                }
                out.push(ButtonSpec::new(attribute_label(slot), act));
            }
            out.extend(feedback_buttons(item));
            out.push(continue_button());
        }
        AgentStage::AwaitingFeedback => {
            out.push(continue_button());
            out.push(restart_button());
            out.push(ButtonSpec::new(QUIT_LABEL, DialogueAct::user(Intent::Bye)));
        }
        AgentStage::Eliciting if last(Intent::NoResults) => {
            for c in state.info_need.iter() {
                out.push(remove_button(catalog, c));
            }
            out.push(restart_button());
        }
        AgentStage::Eliciting => {
            if let Some(slot) = state.pending_elicit() {
                out.push(ButtonSpec::new(
                    DONT_CARE_LABEL,
                    DialogueAct::reveal(vec![Constraint::dont_care(slot)]),
                ));
            }
        }
        AgentStage::Greeting | AgentStage::Closing => {}
    }
    let mut seen = BTreeSet::new();
    out.retain(|b| seen.insert(b.label.clone()));
    out
}
