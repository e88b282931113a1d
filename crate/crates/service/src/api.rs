//! HTTP routes of the turn API. Bodies are JSON in the core serialization.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cinebot_core::DialogueAct;
use serde::{Deserialize, Serialize};

use crate::engine::{TurnInput, TurnResponse};
use crate::error::ServiceError;
use crate::service::Service;

/// Body of `POST /api/sessions`; may be empty.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Body of `POST /api/sessions/{id}/turns`: exactly one of the two fields.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TurnRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<DialogueAct>,
}

impl TurnRequest {
    pub fn into_input(self) -> Result<TurnInput, ServiceError> {
        match (self.text, self.payload) {
            (Some(text), None) => Ok(TurnInput::Text(text)),
            (None, Some(act)) => Ok(TurnInput::Payload(act)),
            _ => Err(ServiceError::Validation("send exactly one of `text` or `payload`".into())),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct TranscriptQuery {
    #[serde(default)]
    pub format: TranscriptFormat,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptFormat {
    #[default]
    Structured,
    Text,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub items: usize,
}

fn parse_body<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, ServiceError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ServiceError::Validation(format!("invalid request body: {e}")))
}

async fn create_session(State(svc): State<Arc<Service>>, body: Bytes) -> Result<(StatusCode, Json<TurnResponse>), ServiceError> {
    let req: CreateSessionRequest = parse_body(&body)?;
    let response = svc.create_session(req.seed).await?;
    Ok((StatusCode::CREATED, Json(response)))
}

async fn post_turn(
    State(svc): State<Arc<Service>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<TurnResponse>, ServiceError> {
    let req: TurnRequest = parse_body(&body)?;
    Ok(Json(svc.post_turn(&id, req.into_input()?).await?))
}

async fn get_session(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(svc.view(&id).await?).into_response())
}

async fn get_transcript(
    State(svc): State<Arc<Service>>,
    Path(id): Path<String>,
    Query(q): Query<TranscriptQuery>,
) -> Result<Response, ServiceError> {
    let doc = svc.transcript(&id).await?;
    Ok(match q.format {
        TranscriptFormat::Structured => Json(doc).into_response(),
        TranscriptFormat::Text => (
            [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
            doc.to_plain_text(),
        )
            .into_response(),
    })
}

async fn health(State(svc): State<Arc<Service>>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        items: svc.engine().catalog().len(),
    })
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/turns", post(post_turn))
        .route("/api/sessions/{id}/transcript", get(get_transcript))
        .with_state(service)
}
