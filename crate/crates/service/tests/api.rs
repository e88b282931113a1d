use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use cinebot_core::nlg::options::{ACCEPT_LABEL, CONTINUE_LABEL, DONT_CARE_LABEL, MORE_INFO_LABEL, QUIT_LABEL, RESTART_LABEL};
use cinebot_core::{AgentStage, Intent};
use cinebot_service::engine::{MAX_UTTERANCE_CHARS, RESTART_NOTICE};
use cinebot_service::repl::{self, Repl};
use cinebot_service::{api, replay, Engine, SeedSource, Service, SessionStore, TranscriptDoc, TurnInput};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn service(dir: Option<&std::path::Path>) -> Arc<Service> {
    let store = SessionStore::new(dir.map(Into::into), chrono::Duration::hours(24)).unwrap();
    Arc::new(Service::new(Arc::new(Engine::bundled()), store, SeedSource::fixed(42)))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (status, json, text)
}

async fn create(app: &Router) -> (String, Value) {
    let (status, body, _) = call(app, "POST", "/api/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    (body["session_id"].as_str().unwrap().to_string(), body)
}

async fn say(app: &Router, id: &str, text: &str) -> Value {
    let (status, body, raw) = call(app, "POST", &format!("/api/sessions/{id}/turns"), Some(json!({ "text": text }))).await;
    assert_eq!(status, StatusCode::OK, "{raw}");
    body
}

async fn press(app: &Router, id: &str, response: &Value, label: &str) -> Value {
    let button = response["buttons"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["label"] == label)
        .unwrap_or_else(|| panic!("no `{label}` in {}", response["buttons"]));
    let (status, body, raw) = call(
        app,
        "POST",
        &format!("/api/sessions/{id}/turns"),
        Some(json!({ "payload": button["payload"].clone() })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{raw}");
    body
}

fn intents(response: &Value) -> Vec<String> {
    response["agent_acts"].as_array().unwrap().iter().map(|a| a["intent"].as_str().unwrap().to_string()).collect()
}

fn labels(response: &Value) -> Vec<String> {
    response["buttons"].as_array().unwrap().iter().map(|b| b["label"].as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn health_reports_catalog() {
    let app = api::router(service(None));
    let (status, body, _) = call(&app, "GET", "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({"status": "ok", "items": 200}));
}

#[tokio::test]
async fn create_welcomes_with_hint() {
    let app = api::router(service(None));
    let (a, body) = create(&app).await;
    let (b, _) = create(&app).await;
    assert_ne!(a, b);
    assert_eq!(intents(&body), ["welcome"]);
    assert_eq!(body["agent_stage"], "greeting");
    assert!(body["utterances"].as_array().unwrap().iter().any(|u| u.as_str().unwrap().contains("/help")));
    assert_eq!(body["turn"], 0);
}

#[tokio::test]
async fn create_accepts_seed() {
    let app = api::router(service(None));
    let (status, body, _) = call(&app, "POST", "/api/sessions", Some(json!({"seed": 7}))).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = body["session_id"].as_str().unwrap();
    let (_, view, _) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    assert_eq!(view["seed"], 7);
    let (status, body, _) = call(&app, "POST", "/api/sessions", Some(json!({"seed": "x"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "validation");
}

/// Recommendation, then the attribute grid, then the post-accept buttons.
#[tokio::test]
async fn button_flow() {
    let dir = tempfile::tempdir().unwrap();
    let app = api::router(service(Some(dir.path())));
    let (id, _) = create(&app).await;
    let r = say(&app, &id, "hi").await;
    assert_eq!(intents(&r), ["welcome", "elicit"]);
    assert_eq!(labels(&r), [DONT_CARE_LABEL]);
    let r = say(&app, &id, "I want action movies").await;
    assert_eq!(intents(&r), ["too_many_results", "elicit"]);
    assert!(r["recap"].as_str().unwrap().contains("action"));
    let r = press(&app, &id, &r, DONT_CARE_LABEL).await;
    assert_eq!(intents(&r), ["too_many_results", "elicit"]);
    let r = say(&app, &id, "from the 90s").await;
    assert_eq!(intents(&r), ["recommend"]);
    assert_eq!(r["recommendation"]["title"], "The Matrix");
    assert_eq!(r["recommendation"]["year"], 1999);

    let r = press(&app, &id, &r, MORE_INFO_LABEL).await;
    assert_eq!(r["agent_stage"], "informing");
    assert!(r.get("recommendation").is_none());
    let mut grid: Vec<String> = labels(&r);
    let mut current = r;
    for attribute in ["Directors", "Actors", "Rating"] {
        assert!(grid.contains(&attribute.to_string()));
        current = press(&app, &id, &current, attribute).await;
        assert_eq!(intents(&current), ["inform"]);
        let next = labels(&current);
        assert!(!next.contains(&attribute.to_string()));
        assert!(next.iter().all(|l| grid.contains(l)), "{next:?} not within {grid:?}");
        grid = next;
    }
    let r = press(&app, &id, &current, ACCEPT_LABEL).await;
    assert_eq!(intents(&r), ["acknowledge"]);
    assert_eq!(labels(&r), [CONTINUE_LABEL, RESTART_LABEL, QUIT_LABEL]);
    let r = press(&app, &id, &r, QUIT_LABEL).await;
    assert_eq!(intents(&r), ["bye"]);
    assert_eq!(r["closed"], true);
}

#[tokio::test]
async fn payloads_echo_byte_identical() {
    let app = api::router(service(None));
    let (id, _) = create(&app).await;
    say(&app, &id, "hi").await;
    say(&app, &id, "action").await;
    say(&app, &id, "I don't care").await;
    let r = say(&app, &id, "released in the 90s").await;
    let sent = r["buttons"][0]["payload"].clone();
    let issued_text = r["buttons"][0]["payload"].to_string();
    press(&app, &id, &r, ACCEPT_LABEL).await;
    let (_, doc, _) = call(&app, "GET", &format!("/api/sessions/{id}/transcript"), None).await;
    let entries = doc["entries"].as_array().unwrap();
    let recorded = &entries[entries.len() - 2];
    assert_eq!(recorded["payload"], sent);
    assert_eq!(recorded["payload"].to_string(), issued_text);
    assert_eq!(recorded["label"], ACCEPT_LABEL);
}

#[tokio::test]
async fn error_codes() {
    let app = api::router(service(None));
    let (status, body, _) = call(&app, "POST", "/api/sessions/nope/turns", Some(json!({"text": "hi"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "not_found");
    let (status, _, _) = call(&app, "GET", "/api/sessions/../etc/transcript", None).await;
    assert_ne!(status, StatusCode::OK);

    let (id, _) = create(&app).await;
    let turns = format!("/api/sessions/{id}/turns");
    let long = "a".repeat(MAX_UTTERANCE_CHARS + 1);
    let (status, body, _) = call(&app, "POST", &turns, Some(json!({ "text": long }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "validation");
    let (status, _, _) = call(&app, "POST", &turns, Some(json!({"text": "hi", "payload": {"intent": "hi", "author": "user", "constraints": []}}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _, _) = call(&app, "POST", &turns, Some(json!({}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _, _) = call(&app, "POST", &turns, Some(json!({"payload": {"intent": "welcome", "author": "agent", "constraints": []}}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let r = say(&app, &id, "/exit").await;
    assert_eq!(intents(&r), ["bye"]);
    let (status, body, _) = call(&app, "POST", &turns, Some(json!({"text": "hi"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "conflict");
    let r = say(&app, &id, "/start").await;
    assert_eq!(intents(&r), ["welcome"]);
}

#[tokio::test]
async fn restart_command_blanks_state() {
    let svc = service(None);
    let app = api::router(svc.clone());
    let (id, _) = create(&app).await;
    say(&app, &id, "hi").await;
    say(&app, &id, "action movies with Tom Cruise").await;
    let r = say(&app, &id, "/restart").await;
    assert_eq!(r["utterances"][0], RESTART_NOTICE);
    assert_eq!(intents(&r), ["welcome"]);
    let s = svc.session(&id).await.unwrap();
    assert_eq!(s.conversation.state.agent_stage, AgentStage::Greeting);
    assert!(s.conversation.state.info_need.is_empty());
    assert!(s.conversation.context.is_empty());
    assert_eq!(s.conversation.state.session_id, id);
}

#[tokio::test]
async fn help_command() {
    let app = api::router(service(None));
    let (id, _) = create(&app).await;
    let r = say(&app, &id, "/help").await;
    assert!(r["utterances"][0].as_str().unwrap().contains("/restart"));
    assert!(intents(&r).is_empty());
    let (status, _, _) = call(&app, "POST", &format!("/api/sessions/{id}/turns"), Some(json!({"text": "/dance"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn transcript_exports() {
    let svc = service(None);
    let app = api::router(svc.clone());
    let (id, first) = create(&app).await;
    let (_, doc, _) = call(&app, "GET", &format!("/api/sessions/{id}/transcript?format=structured"), None).await;
    assert_eq!(doc["entries"].as_array().unwrap().len(), 1);
    assert_eq!(doc["entries"][0]["acts"][0]["intent"], "welcome");

    let mut utterances: Vec<String> =
        first["utterances"].as_array().unwrap().iter().map(|u| u.as_str().unwrap().to_string()).collect();
    for line in ["hi", "comedies please", "no preference", "by Steven Spielberg", "what is it about?"] {
        utterances.push(line.to_string());
        let r = say(&app, &id, line).await;
        utterances.extend(r["utterances"].as_array().unwrap().iter().map(|u| u.as_str().unwrap().to_string()));
    }
    let (status, _, text) = call(&app, "GET", &format!("/api/sessions/{id}/transcript?format=text"), None).await;
    assert_eq!(status, StatusCode::OK);
    let mut pos = 0;
    for u in &utterances {
        let found = text[pos..].find(u.as_str()).unwrap_or_else(|| panic!("`{u}` missing after {pos}"));
        pos += found + u.len();
    }

    let (_, doc, _) = call(&app, "GET", &format!("/api/sessions/{id}/transcript"), None).await;
    let doc: TranscriptDoc = serde_json::from_value(doc).unwrap();
    let rebuilt = replay(svc.engine(), &doc).unwrap();
    assert_eq!(rebuilt, svc.session(&id).await.unwrap());
}

#[tokio::test]
async fn same_seed_same_words() {
    async fn run() -> Vec<Value> {
        let app = api::router(service(None));
        let (status, first, _) = call(&app, "POST", "/api/sessions", Some(json!({"seed": 1234}))).await;
        assert_eq!(status, StatusCode::CREATED);
        let id = first["session_id"].as_str().unwrap().to_string();
        let mut out = vec![first["utterances"].clone()];
        for line in ["hi", "action", "space", "I don't care", "tell me more", "no thanks", "bye"] {
            out.push(say(&app, &id, line).await["utterances"].clone());
        }
        out
    }
    assert_eq!(run().await, run().await);
}

#[tokio::test]
async fn concurrent_turns_serialize() {
    let svc = service(None);
    let app = api::router(svc.clone());
    let (id, _) = create(&app).await;
    let (other, _) = create(&app).await;
    let mut tasks = Vec::new();
    for i in 0..24 {
        let app = app.clone();
        let sid = if i % 3 == 0 { other.clone() } else { id.clone() };
        tasks.push(tokio::spawn(async move {
            let text = if i % 2 == 0 { "hi" } else { "something with horses" };
            say(&app, &sid, text).await["turn"].as_u64().unwrap()
        }));
    }
    let mut turns = Vec::new();
    for t in tasks {
        turns.push(t.await.unwrap());
    }
    let s = svc.session(&id).await.unwrap();
    assert_eq!(s.conversation.turns, 16);
    assert_eq!(svc.session(&other).await.unwrap().conversation.turns, 8);
    let seqs: Vec<u64> = s.transcript.iter().map(|e| e.seq).collect();
    assert_eq!(seqs, (0..33).collect::<Vec<_>>());
    assert!(s.transcript.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
    let mut mine: Vec<u64> = turns.iter().enumerate().filter(|(i, _)| i % 3 != 0).map(|(_, t)| *t).collect();
    mine.sort();
    assert_eq!(mine, (1..=16).collect::<Vec<_>>());
    assert_eq!(replay(svc.engine(), &s.transcript_doc()).unwrap(), s);
}

#[tokio::test]
async fn sessions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let (id, before) = {
        let svc = service(Some(dir.path()));
        let app = api::router(svc.clone());
        let (id, _) = create(&app).await;
        say(&app, &id, "hi").await;
        say(&app, &id, "a thriller").await;
        let before = svc.session(&id).await.unwrap();
        (id, before)
    };
    let svc = service(Some(dir.path()));
    let app = api::router(svc.clone());
    let (status, view, _) = call(&app, "GET", &format!("/api/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["turns"], 2);
    assert_eq!(svc.session(&id).await.unwrap(), before);
    let r = say(&app, &id, "I don't care").await;
    assert_eq!(r["turn"], 3);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::new(Some(dir.path().into()), chrono::Duration::zero()).unwrap();
    let svc = Service::new(Arc::new(Engine::bundled()), store, SeedSource::fixed(1));
    let first = svc.create_session(None).await.unwrap();
    tokio::time::sleep(std::time::Duration::from_millis(5)).await;
    assert!(svc.post_turn(&first.session_id, TurnInput::Text("hi".into())).await.is_err());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

const SCRIPT: [&str; 8] = [
    "hi",
    "I want action movies",
    "I don't care",
    "from the 90s",
    "who directed it?",
    "#accept",
    "more like this",
    "bye",
];

#[tokio::test]
async fn repl_and_api_agree() {
    let svc = service(None);
    let (mut repl, first) = Repl::start(&svc, Some(99)).await.unwrap();
    let mut via_repl = vec![first.agent_acts.clone()];
    for line in SCRIPT {
        let line = if line == "#accept" {
            let n = repl.buttons().iter().position(|b| b.label == ACCEPT_LABEL).unwrap() + 1;
            n.to_string()
        } else {
            line.to_string()
        };
        via_repl.push(repl.send(&line).await.unwrap().agent_acts);
    }

    let app = api::router(service(None));
    let (status, first, _) = call(&app, "POST", "/api/sessions", Some(json!({"seed": 99}))).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = first["session_id"].as_str().unwrap().to_string();
    let mut via_api = vec![first["agent_acts"].clone()];
    let mut last = first;
    for line in SCRIPT {
        last = if line == "#accept" {
            press(&app, &id, &last, ACCEPT_LABEL).await
        } else {
            say(&app, &id, line).await
        };
        via_api.push(last["agent_acts"].clone());
    }
    let via_repl: Vec<Value> = via_repl.iter().map(|a| serde_json::to_value(a).unwrap()).collect();
    assert_eq!(via_repl, via_api);
    let lead: Vec<Intent> = repl_intents(&via_repl);
    use Intent::*;
    assert_eq!(
        lead,
        [Welcome, Elicit, Elicit, Elicit, Recommend, Inform, Acknowledge, Recommend, Bye]
    );
}

fn repl_intents(turns: &[Value]) -> Vec<Intent> {
    turns
        .iter()
        .map(|acts| serde_json::from_value(acts.as_array().unwrap().last().unwrap()["intent"].clone()).unwrap())
        .collect()
}

#[tokio::test]
async fn repl_prints_conversation() {
    let svc = service(None);
    let input = b"hi\naction\n\n/help\nbye\nignored after bye\n";
    let mut out = Vec::new();
    repl::run(&svc, Some(3), &input[..], &mut out).await.unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("cinebot> "));
    assert!(text.contains("[1] I don't care"));
    assert!(text.contains("/restart"));
    assert_eq!(text.matches("you> ").count(), 5);
}
