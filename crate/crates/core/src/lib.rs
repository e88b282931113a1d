//! Dialogue engine for a conversational movie recommender.
//!
//! A turn flows through four stages: [`nlu`] turns an utterance into
//! [`model::DialogueAct`]s, the [`manager`] updates the information need and
//! feedback context against the [`catalog`] and picks the agent's next acts,
//! and [`nlg`] renders those acts and the button options shown to the user.

pub mod catalog;
pub mod manager;
pub mod model;
pub mod nlg;
pub mod nlu;

pub use catalog::Catalog;
pub use model::{
    AgentStage, Author, Constraint, DialogueAct, DialogueContext, DialogueState, FeedbackLabel,
    InformationNeed, Intent, Operator, SlotName, Value,
};
