//! Dialogue acts: an intent plus ordered slot constraints.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Constraint, FeedbackLabel, ModelError, SlotName, Value};

pub type ItemId = String;

/// Communicative function of a turn.
///
/// `Acknowledge` and `Bye` exist on both sides; every other intent belongs
/// to exactly one author role (see [`Intent::allowed_for`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    // user
    Reveal,
    RemovePreference,
    Inquire,
    Accept,
    Reject,
    ContinueRecommendation,
    Hi,
    Deny,
    Restart,
    /// Parser sentinel: nothing understood. The policy answers `CantHelp`.
    Unrecognized,
    // agent
    Elicit,
    TooManyResults,
    Recommend,
    NoResults,
    Inform,
    Welcome,
    CantHelp,
    // shared
    Acknowledge,
    Bye,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Author {
    User,
    Agent,
}

impl fmt::Display for Author {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Author::User => "user",
            Author::Agent => "agent",
        })
    }
}

impl Intent {
    pub const USER: [Intent; 12] = [
        Intent::Reveal,
        Intent::RemovePreference,
        Intent::Inquire,
        Intent::Accept,
        Intent::Reject,
        Intent::ContinueRecommendation,
        Intent::Hi,
        Intent::Acknowledge,
        Intent::Deny,
        Intent::Bye,
        Intent::Restart,
        Intent::Unrecognized,
    ];

    pub const AGENT: [Intent; 9] = [
        Intent::Elicit,
        Intent::TooManyResults,
        Intent::Recommend,
        Intent::NoResults,
        Intent::Inform,
        Intent::Welcome,
        Intent::Acknowledge,
        Intent::CantHelp,
        Intent::Bye,
    ];

    pub fn allowed_for(self, author: Author) -> bool {
        match author {
            Author::User => Self::USER.contains(&self),
            Author::Agent => Self::AGENT.contains(&self),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Intent::Reveal => "reveal",
            Intent::RemovePreference => "remove_preference",
            Intent::Inquire => "inquire",
            Intent::Accept => "accept",
            Intent::Reject => "reject",
            Intent::ContinueRecommendation => "continue_recommendation",
            Intent::Hi => "hi",
            Intent::Deny => "deny",
            Intent::Restart => "restart",
            Intent::Unrecognized => "unrecognized",
            Intent::Elicit => "elicit",
            Intent::TooManyResults => "too_many_results",
            Intent::Recommend => "recommend",
            Intent::NoResults => "no_results",
            Intent::Inform => "inform",
            Intent::Welcome => "welcome",
            Intent::CantHelp => "cant_help",
            Intent::Acknowledge => "acknowledge",
            Intent::Bye => "bye",
        }
    }
}

impl fmt::Display for Intent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Machine-readable rendering of one utterance.
///
/// Besides the constraint list an act may reference an item (`Recommend`,
/// and the agent's `Acknowledge` of an accepted item), carry a match count
/// (`TooManyResults`, `NoResults`) or name the feedback reason of a `Reject`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAct")]
pub struct DialogueAct {
    pub intent: Intent,
    pub author: Author,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<ItemId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<FeedbackLabel>,
}

#[derive(Deserialize)]
struct RawAct {
    intent: Intent,
    author: Author,
    #[serde(default)]
    constraints: Vec<Constraint>,
    #[serde(default)]
    item: Option<ItemId>,
    #[serde(default)]
    count: Option<u64>,
    #[serde(default)]
    feedback: Option<FeedbackLabel>,
}

impl TryFrom<RawAct> for DialogueAct {
    type Error = ModelError;

    fn try_from(raw: RawAct) -> Result<Self, Self::Error> {
        let act = DialogueAct {
            intent: raw.intent,
            author: raw.author,
            constraints: raw.constraints,
            item: raw.item,
            count: raw.count,
            feedback: raw.feedback,
        };
        act.validate()?;
        Ok(act)
    }
}

impl DialogueAct {
    fn bare(author: Author, intent: Intent) -> Self {
        DialogueAct {
            intent,
            author,
            constraints: Vec::new(),
            item: None,
            count: None,
            feedback: None,
        }
    }

    pub fn user(intent: Intent) -> Self {
        Self::bare(Author::User, intent)
    }

    pub fn agent(intent: Intent) -> Self {
        Self::bare(Author::Agent, intent)
    }

    pub fn with_constraints(mut self, constraints: Vec<Constraint>) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_item(mut self, item: impl Into<ItemId>) -> Self {
        self.item = Some(item.into());
        self
    }

    pub fn with_count(mut self, count: u64) -> Self {
        self.count = Some(count);
        self
    }

    pub fn with_feedback(mut self, label: FeedbackLabel) -> Self {
        self.feedback = Some(label);
        self
    }

    pub fn reveal(constraints: Vec<Constraint>) -> Self {
        Self::user(Intent::Reveal).with_constraints(constraints)
    }

    pub fn remove(constraints: Vec<Constraint>) -> Self {
        Self::user(Intent::RemovePreference).with_constraints(constraints)
    }

    pub fn inquire(slot: Option<SlotName>) -> Self {
        Self::user(Intent::Inquire).with_constraints(slot.map(Constraint::asking).into_iter().collect())
    }

    pub fn elicit(slot: SlotName) -> Self {
        Self::agent(Intent::Elicit).with_constraints(vec![Constraint::asking(slot)])
    }

    pub fn recommend(item: impl Into<ItemId>) -> Self {
        Self::agent(Intent::Recommend).with_item(item)
    }

    /// The single slot an `Elicit` or `Inquire` asks about.
    pub fn asked_slot(&self) -> Option<SlotName> {
        match self.intent {
            Intent::Elicit | Intent::Inquire => self.constraints.first().map(|c| c.slot),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.intent.allowed_for(self.author) {
            return Err(ModelError::IntentNotAllowed {
                intent: self.intent,
                author: self.author,
            });
        }
        let invalid = |reason: &str| {
            Err(ModelError::InvalidAct {
                intent: self.intent,
                reason: reason.to_string(),
            })
        };
        match self.intent {
            Intent::Elicit => {
                if self.constraints.len() != 1 || self.constraints[0].value.is_filled() {
                    return invalid("elicit carries exactly one unfilled constraint");
                }
            }
            Intent::Inquire => {
                if self.constraints.len() > 1 || self.constraints.iter().any(|c| c.value.is_filled()) {
                    return invalid("inquire carries at most one unfilled constraint");
                }
            }
            Intent::Inform | Intent::Reveal | Intent::RemovePreference => {
                if self.constraints.iter().any(|c| !c.value.is_filled()) {
                    return invalid("constraints must carry filled values");
                }
                if self.intent != Intent::Inform && self.constraints.is_empty() {
                    return invalid("at least one constraint is required");
                }
            }
            Intent::Recommend => {
                if self.item.as_deref().is_none_or(str::is_empty) {
                    return invalid("recommend references exactly one item");
                }
            }
            Intent::TooManyResults => {
                if self.count.is_none() {
                    return invalid("too_many_results carries a count");
                }
            }
            Intent::Reject => {
                if matches!(
                    self.feedback,
                    Some(FeedbackLabel::Accepted) | Some(FeedbackLabel::Inquired)
                ) {
                    return invalid("reject feedback must be rejected, dont_like or watched");
                }
            }
            _ => {}
        }
        if self.intent != Intent::Reject && self.feedback.is_some() {
            return invalid("only reject carries a feedback label");
        }
        Ok(())
    }

    /// Values of a slot within this act, in order.
    pub fn values_of(&self, slot: SlotName) -> impl Iterator<Item = &Value> {
        self.constraints
            .iter()
            .filter(move |c| c.slot == slot)
            .map(|c| &c.value)
    }
}

impl fmt::Display for DialogueAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.intent)?;
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        if let Some(item) = &self.item {
            write!(f, "item={item}")?;
        }
        if let Some(count) = self.count {
            write!(f, "count={count}")?;
        }
        f.write_str(")")
    }
}
