use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::engine::{Engine, TurnInput, TurnResponse};
use crate::error::ServiceError;
use crate::session::{Session, TranscriptDoc};
use crate::store::SessionStore;

/// Where session seeds come from when the client does not give one.
#[derive(Debug)]
pub enum SeedSource {
    Random,
    /// Derived from a base seed and a counter, for reproducible runs.
    Fixed { base: u64, next: AtomicU64 },
}

impl SeedSource {
    pub fn fixed(base: u64) -> Self {
        SeedSource::Fixed {
            base,
            next: AtomicU64::new(0),
        }
    }

    fn draw(&self) -> u64 {
        match self {
            SeedSource::Random => rand::random(),
            SeedSource::Fixed { base, next } => base.wrapping_add(next.fetch_add(1, Ordering::Relaxed)),
        }
    }
}

/// Session metadata returned when a client resumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub seed: u64,
    pub created_at: DateTime<Utc>,
    pub last_active: DateTime<Utc>,
    pub turns: u64,
    pub closed: bool,
    pub last_response: TurnResponse,
}

/// Session lifecycle on top of an [`Engine`] and a [`SessionStore`].
pub struct Service {
    engine: Arc<Engine>,
    store: SessionStore,
    seeds: SeedSource,
}

impl Service {
    pub fn new(engine: Arc<Engine>, store: SessionStore, seeds: SeedSource) -> Self {
        Service { engine, store, seeds }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }

    pub async fn create_session(&self, seed: Option<u64>) -> Result<TurnResponse, ServiceError> {
        let id = uuid::Uuid::new_v4().to_string();
        let seed = seed.unwrap_or_else(|| self.seeds.draw());
        let session = Session::open(&self.engine, &id, seed)?;
        let response = session.last_response.clone();
        self.store.insert(session).await?;
        tracing::info!(session = %id, seed, "session created");
        Ok(response)
    }

    pub async fn post_turn(&self, id: &str, input: TurnInput) -> Result<TurnResponse, ServiceError> {
        let handle = self.store.get(&self.engine, id).await?;
        let mut session = handle.lock().await;
        let (next, appended) = session.advance(&self.engine, &input)?;
        if let Err(e) = self.store.persist_turn(&next, &appended) {
            drop(session);
            // The files may now be ahead of memory; reload them next time.
            let _ = self.evict(id).await;
            return Err(e);
        }
        *session = next;
        Ok(session.last_response.clone())
    }

    async fn evict(&self, id: &str) -> Result<(), ServiceError> {
        if self.store.dir().is_none() {
            return Ok(());
        }
        self.store.forget(id).await;
        Ok(())
    }

    pub async fn transcript(&self, id: &str) -> Result<TranscriptDoc, ServiceError> {
        let handle = self.store.get(&self.engine, id).await?;
        let session = handle.lock().await;
        Ok(session.transcript_doc())
    }

    pub async fn view(&self, id: &str) -> Result<SessionView, ServiceError> {
        let handle = self.store.get(&self.engine, id).await?;
        let s = handle.lock().await;
        Ok(SessionView {
            session_id: s.id().to_string(),
            seed: s.conversation.seed,
            created_at: s.created_at,
            last_active: s.last_active,
            turns: s.conversation.turns,
            closed: s.is_closed(),
            last_response: s.last_response.clone(),
        })
    }

    /// Full session value, for tests and tooling.
    pub async fn session(&self, id: &str) -> Result<Session, ServiceError> {
        let handle = self.store.get(&self.engine, id).await?;
        let s = handle.lock().await;
        Ok(s.clone())
    }
}
