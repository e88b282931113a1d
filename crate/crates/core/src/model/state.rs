use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DialogueAct, DialogueContext, InformationNeed, Intent, ItemId, SlotName};

/// Where the agent is in the conversation flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentStage {
    #[default]
    Greeting,
    Eliciting,
    Recommending,
    Informing,
    AwaitingFeedback,
    Closing,
}

impl AgentStage {
    pub const ALL: [AgentStage; 6] = [
        AgentStage::Greeting,
        AgentStage::Eliciting,
        AgentStage::Recommending,
        AgentStage::Informing,
        AgentStage::AwaitingFeedback,
        AgentStage::Closing,
    ];

    /// Stages in which a recommendation is on the table.
    pub fn has_recommendation(self) -> bool {
        matches!(
            self,
            AgentStage::Recommending | AgentStage::Informing | AgentStage::AwaitingFeedback
        )
    }

    /// Stage an agent act moves the conversation to; `None` leaves it as is.
    pub fn after(intent: Intent) -> Option<AgentStage> {
        match intent {
            Intent::Welcome => Some(AgentStage::Greeting),
            Intent::Elicit | Intent::TooManyResults | Intent::NoResults => Some(AgentStage::Eliciting),
            Intent::Recommend => Some(AgentStage::Recommending),
            Intent::Inform => Some(AgentStage::Informing),
            Intent::Acknowledge => Some(AgentStage::AwaitingFeedback),
            Intent::Bye => Some(AgentStage::Closing),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AgentStage::Greeting => "greeting",
            AgentStage::Eliciting => "eliciting",
            AgentStage::Recommending => "recommending",
            AgentStage::Informing => "informing",
            AgentStage::AwaitingFeedback => "awaiting_feedback",
            AgentStage::Closing => "closing",
        }
    }
}

impl fmt::Display for AgentStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full per-conversation snapshot.
///
/// `matching_items` holds at most [`DialogueState::MATCH_CAP`] ids in ranking
/// order; `match_count` is always the exact size of the match set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueState {
    #[serde(default)]
    pub session_id: String,
    #[serde(default)]
    pub last_user_acts: Vec<DialogueAct>,
    #[serde(default)]
    pub last_agent_acts: Vec<DialogueAct>,
    #[serde(default)]
    pub info_need: InformationNeed,
    #[serde(default)]
    pub matching_items: Vec<ItemId>,
    #[serde(default)]
    pub match_count: usize,
    #[serde(default)]
    pub current_recommendation: Option<ItemId>,
    #[serde(default)]
    pub agent_stage: AgentStage,
    #[serde(default)]
    pub elicit_count: u32,
    #[serde(default)]
    pub inquired_attributes: BTreeSet<SlotName>,
}

impl DialogueState {
    pub const MATCH_CAP: usize = 100;

    pub fn new(session_id: impl Into<String>) -> Self {
        DialogueState {
            session_id: session_id.into(),
            ..Default::default()
        }
    }

    /// Blank state for the same session.
    pub fn restart(&self) -> DialogueState {
        DialogueState::new(self.session_id.clone())
    }

    /// Slot of the most recent agent `Elicit`, if the last agent turn asked one.
    pub fn pending_elicit(&self) -> Option<SlotName> {
        self.last_agent_acts
            .iter()
            .rev()
            .find(|a| a.intent == Intent::Elicit)
            .and_then(DialogueAct::asked_slot)
    }

    pub fn is_closed(&self) -> bool {
        self.agent_stage == AgentStage::Closing
    }

    /// Structural invariants that hold after every turn.
    pub fn check_invariants(&self, max_elicit: u32) -> Result<(), String> {
        if self.current_recommendation.is_some() != self.agent_stage.has_recommendation() {
            return Err(format!(
                "recommendation {:?} inconsistent with stage {}",
                self.current_recommendation, self.agent_stage
            ));
        }
        if self.elicit_count > max_elicit {
            return Err(format!("elicit_count {} > {max_elicit}", self.elicit_count));
        }
        if self.current_recommendation.is_none() && !self.inquired_attributes.is_empty() {
            return Err("inquired attributes without a recommendation".into());
        }
        Ok(())
    }
}

/// Erases the information need, the feedback history and the current
/// recommendation while keeping the session identity.
pub fn restart(state: &DialogueState) -> (DialogueState, DialogueContext) {
    (state.restart(), DialogueContext::new())
}
