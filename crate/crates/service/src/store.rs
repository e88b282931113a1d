//! Session storage: an in-memory table of live sessions, optionally backed
//! by a directory holding `<id>.json` snapshots and `<id>.transcript.jsonl`
//! append-only logs.
//!
//! A turn is persisted by appending its two transcript lines and then
//! atomically replacing the snapshot. On load the transcript is replayed and
//! wins over a stale snapshot; a torn final line is discarded.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use crate::engine::{Conversation, Engine, TurnResponse};
use crate::error::ServiceError;
use crate::session::{replay, Session, TranscriptDoc, TranscriptEntry};

pub const DEFAULT_TTL_HOURS: i64 = 24;

/// Snapshot file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub conversation: Conversation,
    pub created_at: DateTime<Utc>,
    pub last_active: DateTime<Utc>,
    pub transcript_len: usize,
    pub last_response: TurnResponse,
}

impl Snapshot {
    pub fn of(session: &Session) -> Snapshot {
        Snapshot {
            conversation: session.conversation.clone(),
            created_at: session.created_at,
            last_active: session.last_active,
            transcript_len: session.transcript.len(),
            last_response: session.last_response.clone(),
        }
    }
}

/// Ids are generated as UUIDs; anything else never names a file.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

pub fn snapshot_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

pub fn transcript_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.transcript.jsonl"))
}

pub fn read_snapshot(dir: &Path, id: &str) -> Result<Snapshot, ServiceError> {
    let bytes = fs::read(snapshot_path(dir, id))?;
    serde_json::from_slice(&bytes).map_err(|e| ServiceError::Corrupt(format!("{id} snapshot: {e}")))
}

/// Reads the transcript log, dropping a torn last line and a final user
/// entry whose reply was never written.
pub fn read_transcript(dir: &Path, id: &str) -> Result<Vec<TranscriptEntry>, ServiceError> {
    let file = File::open(transcript_path(dir, id))?;
    let lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>()?;
    let mut entries = Vec::with_capacity(lines.len());
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<TranscriptEntry>(line) {
            Ok(e) => entries.push(e),
            Err(_) if i == last => tracing::warn!(session = id, "dropping torn transcript line"),
            Err(e) => return Err(ServiceError::Corrupt(format!("{id} transcript line {}: {e}", i + 1))),
        }
    }
    if entries.len() % 2 == 0 && !entries.is_empty() {
        tracing::warn!(session = id, "dropping user entry without reply");
        entries.pop();
    }
    Ok(entries)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_data()?;
    }
    fs::rename(&tmp, path)
}

fn write_snapshot(dir: &Path, session: &Session) -> Result<(), ServiceError> {
    let json = serde_json::to_vec_pretty(&Snapshot::of(session)).map_err(|e| ServiceError::Engine(e.to_string()))?;
    write_atomic(&snapshot_path(dir, session.id()), &json)?;
    Ok(())
}

fn append_lines(path: &Path, entries: &[TranscriptEntry]) -> Result<(), ServiceError> {
    let mut buf = Vec::new();
    for e in entries {
        serde_json::to_writer(&mut buf, e).map_err(|e| ServiceError::Engine(e.to_string()))?;
        buf.push(b'\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&buf)?;
    f.sync_data()?;
    Ok(())
}

/// Rewrites the transcript log in full, used after trimming on load.
fn rewrite_transcript(dir: &Path, session: &Session) -> Result<(), ServiceError> {
    let mut buf = Vec::new();
    for e in &session.transcript {
        serde_json::to_writer(&mut buf, e).map_err(|e| ServiceError::Engine(e.to_string()))?;
        buf.push(b'\n');
    }
    write_atomic(&transcript_path(dir, session.id()), &buf)?;
    Ok(())
}

pub type SessionHandle = Arc<Mutex<Session>>;

/// Live sessions plus their on-disk copies. Each session sits behind its own
/// async mutex, so turns on one session run one at a time in lock order while
/// different sessions proceed independently.
pub struct SessionStore {
    dir: Option<PathBuf>,
    ttl: Duration,
    live: Mutex<HashMap<String, SessionHandle>>,
}

impl SessionStore {
    /// `dir = None` keeps sessions in memory only.
    pub fn new(dir: Option<PathBuf>, ttl: Duration) -> Result<Self, ServiceError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(SessionStore {
            dir,
            ttl,
            live: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn is_expired(&self, session: &Session, now: DateTime<Utc>) -> bool {
        now - session.last_active > self.ttl
    }

    /// Stores a freshly opened session.
    pub async fn insert(&self, session: Session) -> Result<SessionHandle, ServiceError> {
        if let Some(dir) = &self.dir {
            append_lines(&transcript_path(dir, session.id()), &session.transcript)?;
            write_snapshot(dir, &session)?;
        }
        let id = session.id().to_string();
        let handle = Arc::new(Mutex::new(session));
        self.live.lock().await.insert(id, handle.clone());
        Ok(handle)
    }

    /// Persists one turn. Called with the session lock held, before the new
    /// session value replaces the old one.
    pub fn persist_turn(&self, session: &Session, appended: &[TranscriptEntry]) -> Result<(), ServiceError> {
        if let Some(dir) = &self.dir {
            append_lines(&transcript_path(dir, session.id()), appended)?;
            write_snapshot(dir, session)?;
        }
        Ok(())
    }

    /// Finds a live session or resumes it from disk.
    pub async fn get(&self, engine: &Engine, id: &str) -> Result<SessionHandle, ServiceError> {
        if !valid_id(id) {
            return Err(ServiceError::NotFound(id.to_string()));
        }
        let mut live = self.live.lock().await;
        let handle = match live.get(id) {
            Some(h) => h.clone(),
            None => {
                let session = self.load(engine, id)?;
                let handle = Arc::new(Mutex::new(session));
                live.insert(id.to_string(), handle.clone());
                handle
            }
        };
        drop(live);
        let expired = self.is_expired(&*handle.lock().await, Utc::now());
        if expired {
            self.remove(id).await?;
            return Err(ServiceError::NotFound(id.to_string()));
        }
        Ok(handle)
    }

    fn load(&self, engine: &Engine, id: &str) -> Result<Session, ServiceError> {
        let Some(dir) = &self.dir else {
            return Err(ServiceError::NotFound(id.to_string()));
        };
        if !transcript_path(dir, id).exists() {
            return Err(ServiceError::NotFound(id.to_string()));
        }
        let entries = read_transcript(dir, id)?;
        let (seed, created_at) = match read_snapshot(dir, id) {
            Ok(s) => (s.conversation.seed, s.created_at),
            Err(ServiceError::Storage(e)) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ServiceError::Corrupt(format!("{id}: transcript without snapshot")))
            }
            Err(e) => return Err(e),
        };
        let doc = TranscriptDoc {
            session_id: id.to_string(),
            seed,
            created_at,
            entries,
        };
        let session = replay(engine, &doc)?;
        let snapshot = read_snapshot(dir, id)?;
        if snapshot != Snapshot::of(&session) {
            tracing::info!(session = id, "snapshot behind transcript; rewriting");
            rewrite_transcript(dir, &session)?;
            write_snapshot(dir, &session)?;
        }
        Ok(session)
    }

    /// Drops the in-memory copy only; the next access reloads from disk.
    pub async fn forget(&self, id: &str) {
        self.live.lock().await.remove(id);
    }

    /// Forgets a session and deletes its files.
    pub async fn remove(&self, id: &str) -> Result<(), ServiceError> {
        self.live.lock().await.remove(id);
        if let Some(dir) = &self.dir {
            for path in [snapshot_path(dir, id), transcript_path(dir, id)] {
                match fs::remove_file(path) {
                    Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Drops every live session idle for longer than the TTL, plus expired
    /// sessions that only exist on disk. Returns how many were removed.
    pub async fn purge_expired(&self) -> Result<usize, ServiceError> {
        let now = Utc::now();
        let handles: Vec<(String, SessionHandle)> =
            self.live.lock().await.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut expired = Vec::new();
        for (id, h) in handles {
            if self.is_expired(&*h.lock().await, now) {
                expired.push(id);
            }
        }
        if let Some(dir) = &self.dir {
            for entry in fs::read_dir(dir)? {
                let name = entry?.file_name().to_string_lossy().into_owned();
                let Some(id) = name.strip_suffix(".json") else { continue };
                if expired.iter().any(|e| e == id) || self.live.lock().await.contains_key(id) {
                    continue;
                }
                if let Ok(s) = read_snapshot(dir, id) {
                    if now - s.last_active > self.ttl {
                        expired.push(id.to_string());
                    }
                }
            }
        }
        for id in &expired {
            self.remove(id).await?;
        }
        Ok(expired.len())
    }

    pub async fn live_count(&self) -> usize {
        self.live.lock().await.len()
    }
}
