//! Shared dialogue vocabulary: acts, information need, feedback context and
//! the per-conversation dialogue state.

mod act;
mod context;
mod need;
mod slot;
mod state;

use thiserror::Error;

pub use act::{Author, DialogueAct, Intent, ItemId};
pub use context::{record_feedback, DialogueContext, FeedbackLabel};
pub use need::{apply_user_act, InformationNeed, SlotConstraint};
pub use slot::{canonical_text, Constraint, Operator, SlotKind, SlotName, Value, DONT_CARE_MARKER};
pub use state::{restart, AgentStage, DialogueState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown slot {0:?}")]
    UnknownSlot(String),
    #[error("operator {op} is not allowed on slot {slot}")]
    OperatorNotAllowed { slot: SlotName, op: Operator },
    #[error("value {value:?} does not match the kind of slot {slot}")]
    KindMismatch { slot: SlotName, value: String },
    #[error("invalid value for slot {slot}: {reason}")]
    InvalidValue { slot: SlotName, reason: String },
    #[error("intent {intent} cannot be authored by the {author}")]
    IntentNotAllowed { intent: Intent, author: Author },
    #[error("invalid {intent} act: {reason}")]
    InvalidAct { intent: Intent, reason: String },
}
