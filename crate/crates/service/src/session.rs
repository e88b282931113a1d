//! Sessions, their transcripts, and rebuilding a session from its transcript.

use chrono::{DateTime, Duration, Utc};
use cinebot_core::{Author, DialogueAct};
use serde::{Deserialize, Serialize};

use crate::engine::{Conversation, Engine, TurnInput, TurnResponse};
use crate::error::ServiceError;

/// One message in a conversation. User entries carry either `text` or
/// `payload` (plus the pressed button's `label` when known); agent entries
/// carry the rendered `utterances`. Both carry the acts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    pub timestamp: DateTime<Utc>,
    pub author: Author,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<DialogueAct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub utterances: Vec<String>,
    pub acts: Vec<DialogueAct>,
}

impl TranscriptEntry {
    fn input(&self) -> Option<TurnInput> {
        match (&self.text, &self.payload) {
            (Some(text), None) => Some(TurnInput::Text(text.clone())),
            (None, Some(act)) => Some(TurnInput::Payload(act.clone())),
            _ => None,
        }
    }
}

/// Structured transcript export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptDoc {
    pub session_id: String,
    pub seed: u64,
    pub created_at: DateTime<Utc>,
    pub entries: Vec<TranscriptEntry>,
}

impl TranscriptDoc {
    /// One line per utterance: `<timestamp> <author>: <text>`.
    pub fn to_plain_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let ts = e.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Micros, true);
            let lines: Vec<String> = match e.author {
                Author::Agent => e.utterances.clone(),
                Author::User => match (&e.text, &e.label, &e.payload) {
                    (Some(text), _, _) => vec![text.clone()],
                    (None, Some(label), _) => vec![format!("[{label}]")],
                    (None, None, Some(act)) => vec![format!("[{act}]")],
                    _ => vec![String::new()],
                },
            };
            for line in lines {
                out.push_str(&format!("{ts} {}: {line}\n", e.author));
            }
        }
        out
    }
}

/// A live conversation with its history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub conversation: Conversation,
    pub created_at: DateTime<Utc>,
    pub last_active: DateTime<Utc>,
    pub transcript: Vec<TranscriptEntry>,
    pub last_response: TurnResponse,
}

/// Timestamp strictly after `prev`, so the transcript stays ordered even when
/// the clock does not advance.
pub fn next_timestamp(prev: Option<DateTime<Utc>>) -> DateTime<Utc> {
    let now = Utc::now();
    match prev {
        Some(p) if now <= p => p + Duration::microseconds(1),
        _ => now,
    }
}

impl Session {
    pub fn open(engine: &Engine, id: &str, seed: u64) -> Result<Session, ServiceError> {
        let (conversation, response) = engine.open(id, seed)?;
        let now = next_timestamp(None);
        let entry = TranscriptEntry {
            seq: 0,
            timestamp: now,
            author: Author::Agent,
            text: None,
            payload: None,
            label: None,
            utterances: response.utterances.clone(),
            acts: response.agent_acts.clone(),
        };
        Ok(Session {
            conversation,
            created_at: now,
            last_active: now,
            transcript: vec![entry],
            last_response: response,
        })
    }

    pub fn id(&self) -> &str {
        &self.conversation.id
    }

    pub fn is_closed(&self) -> bool {
        self.conversation.state.is_closed()
    }

    /// Runs one turn on a copy and returns the new session with the two
    /// transcript entries it appended. `self` is untouched, so a failed
    /// persist leaves nothing half-applied.
    pub fn advance(&self, engine: &Engine, input: &TurnInput) -> Result<(Session, [TranscriptEntry; 2]), ServiceError> {
        let mut next = self.clone();
        let (acts, response) = engine.step(&mut next.conversation, input)?;
        let label = match input {
            TurnInput::Payload(act) => self
                .last_response
                .buttons
                .iter()
                .find(|b| &b.payload == act)
                .map(|b| b.label.clone()),
            TurnInput::Text(_) => None,
        };
        let seq = self.transcript.len() as u64;
        let user_ts = next_timestamp(self.transcript.last().map(|e| e.timestamp));
        let agent_ts = next_timestamp(Some(user_ts));
        let (text, payload) = match input {
            TurnInput::Text(t) => (Some(t.clone()), None),
            TurnInput::Payload(p) => (None, Some(p.clone())),
        };
        let user = TranscriptEntry {
            seq,
            timestamp: user_ts,
            author: Author::User,
            text,
            payload,
            label,
            utterances: Vec::new(),
            acts,
        };
        let agent = TranscriptEntry {
            seq: seq + 1,
            timestamp: agent_ts,
            author: Author::Agent,
            text: None,
            payload: None,
            label: None,
            utterances: response.utterances.clone(),
            acts: response.agent_acts.clone(),
        };
        next.transcript.push(user.clone());
        next.transcript.push(agent.clone());
        next.last_active = agent_ts;
        next.last_response = response;
        Ok((next, [user, agent]))
    }

    pub fn transcript_doc(&self) -> TranscriptDoc {
        TranscriptDoc {
            session_id: self.id().to_string(),
            seed: self.conversation.seed,
            created_at: self.created_at,
            entries: self.transcript.clone(),
        }
    }
}

/// Rebuilds a session by re-applying the recorded user acts. Fails if the
/// transcript is malformed or the agent's recorded acts differ from what the
/// engine produces now.
pub fn replay(engine: &Engine, doc: &TranscriptDoc) -> Result<Session, ServiceError> {
    let corrupt = |msg: String| ServiceError::Corrupt(format!("{}: {msg}", doc.session_id));
    let mut entries = doc.entries.iter();
    let opening = entries.next().ok_or_else(|| corrupt("empty transcript".into()))?;
    let mut session = Session::open(engine, &doc.session_id, doc.seed)?;
    if opening.author != Author::Agent || opening.acts != session.last_response.agent_acts {
        return Err(corrupt("transcript does not start with the opening turn".into()));
    }
    session.created_at = doc.created_at;
    session.last_active = opening.timestamp;
    session.transcript = vec![opening.clone()];

    let mut prev = opening.timestamp;
    while let Some(user) = entries.next() {
        let agent = entries
            .next()
            .ok_or_else(|| corrupt(format!("entry {} has no agent reply", user.seq)))?;
        if user.author != Author::User || agent.author != Author::Agent {
            return Err(corrupt(format!("entries {} and {} are out of turn", user.seq, agent.seq)));
        }
        if user.timestamp <= prev || agent.timestamp <= user.timestamp {
            return Err(corrupt(format!("entry {} is out of time order", user.seq)));
        }
        prev = agent.timestamp;
        let input = user
            .input()
            .ok_or_else(|| corrupt(format!("entry {} has neither text nor payload", user.seq)))?;
        let response = engine.apply(&mut session.conversation, &input, &user.acts)?;
        if response.agent_acts != agent.acts {
            return Err(corrupt(format!("agent acts diverge at entry {}", agent.seq)));
        }
        if response.utterances != agent.utterances {
            tracing::warn!(session = %doc.session_id, seq = agent.seq, "replayed utterances differ; templates changed?");
        }
        session.transcript.push(user.clone());
        session.transcript.push(agent.clone());
        session.last_active = agent.timestamp;
        session.last_response = response;
    }
    Ok(session)
}
