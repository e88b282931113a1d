//! Hosts cinebot conversations: sessions with persisted transcripts, an HTTP
//! turn API and a terminal REPL, all driving the same [`engine::Engine`].

pub mod api;
pub mod convert;
pub mod engine;
pub mod error;
pub mod repl;
pub mod service;
pub mod session;
pub mod store;

pub use engine::{Engine, EngineFiles, TurnInput, TurnResponse};
pub use error::ServiceError;
pub use service::{SeedSource, Service};
pub use session::{replay, Session, TranscriptDoc, TranscriptEntry};
pub use store::SessionStore;
