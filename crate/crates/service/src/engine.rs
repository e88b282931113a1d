//! The turn pipeline shared by the HTTP API and the REPL: input to acts,
//! acts through the dialogue manager, agent acts to text and buttons.

use std::path::PathBuf;

use anyhow::Context as _;
use cinebot_core::catalog::GenreSynonyms;
use cinebot_core::manager::{initial_state, update_state, welcome, PolicyConfig};
use cinebot_core::nlg::{options_for, policy_signatures, ButtonSpec, Nlg, TemplateSet};
use cinebot_core::nlu::{Nlu, PatternRegistry};
use cinebot_core::{AgentStage, Author, Catalog, DialogueAct, DialogueContext, DialogueState, Intent};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Longest accepted free-text utterance, in characters.
pub const MAX_UTTERANCE_CHARS: usize = 1024;

pub const HELP_HINT: &str = "Type /help to see the available commands.";
pub const HELP_TEXT: &str = "Tell me what kind of movie you are looking for, or use the buttons. \
Commands: /start begins a conversation, /restart forgets your preferences and starts over, \
/exit ends the conversation, /help shows this message.";
pub const RESTART_NOTICE: &str = "Starting over. I have forgotten your preferences.";

/// Slash commands understood in free text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Start,
    Restart,
    Exit,
    Help,
}

impl Command {
    /// `None` if the text is not a command at all.
    pub fn parse(text: &str) -> Option<Result<Command, ServiceError>> {
        let word = text.trim();
        if !word.starts_with('/') {
            return None;
        }
        Some(match word.to_ascii_lowercase().as_str() {
            "/start" => Ok(Command::Start),
            "/restart" => Ok(Command::Restart),
            "/exit" | "/quit" => Ok(Command::Exit),
            "/help" => Ok(Command::Help),
            _ => Err(ServiceError::Validation(format!("unknown command `{word}`; try /help"))),
        })
    }

    fn acts(self) -> Vec<DialogueAct> {
        match self {
            Command::Start | Command::Restart => vec![DialogueAct::user(Intent::Restart)],
            Command::Exit => vec![DialogueAct::user(Intent::Bye)],
            Command::Help => Vec::new(),
        }
    }
}

/// What the user sent: typed text or a pressed button.
#[derive(Debug, Clone, PartialEq)]
pub enum TurnInput {
    Text(String),
    Payload(DialogueAct),
}

impl TurnInput {
    fn command(&self) -> Option<Result<Command, ServiceError>> {
        match self {
            TurnInput::Text(t) => Command::parse(t),
            TurnInput::Payload(_) => None,
        }
    }
}

/// Details shown with a recommended movie.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationCard {
    pub item_id: String,
    pub title: String,
    pub year: i64,
    pub rating: f64,
    pub plot: String,
    pub item_url: String,
    pub cover_url: String,
}

/// Everything the client needs to render one agent turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnResponse {
    pub session_id: String,
    /// 0 for the opening turn, then one per user turn.
    pub turn: u64,
    pub utterances: Vec<String>,
    pub buttons: Vec<ButtonSpec>,
    pub agent_stage: AgentStage,
    pub agent_acts: Vec<DialogueAct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recap: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<RecommendationCard>,
    pub closed: bool,
}

/// Dialogue state of one conversation plus what is needed to continue it
/// deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversation {
    pub id: String,
    pub seed: u64,
    /// User turns processed so far.
    pub turns: u64,
    pub state: DialogueState,
    pub context: DialogueContext,
}

/// Optional overrides for the bundled data files.
#[derive(Debug, Clone, Default)]
pub struct EngineFiles {
    pub catalog: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
    pub policy: Option<PathBuf>,
}

/// Appends [`HELP_HINT`] unless a template already pointed at `/help`.
fn add_help_hint(response: &mut TurnResponse) {
    if !response.utterances.iter().any(|u| u.contains("/help")) {
        response.utterances.push(HELP_HINT.to_string());
    }
}

/// Generator seed for the text of turn `turn` of a session seeded `seed`.
pub fn turn_seed(seed: u64, turn: u64) -> u64 {
    seed ^ turn.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug)]
pub struct Engine {
    catalog: Catalog,
    nlu: Nlu,
    nlg: Nlg,
    config: PolicyConfig,
}

impl Engine {
    pub fn new(catalog: Catalog, patterns: PatternRegistry, templates: TemplateSet, config: PolicyConfig) -> anyhow::Result<Self> {
        config.validate().context("invalid policy configuration")?;
        for (intent, sig) in policy_signatures(&config) {
            templates
                .get(intent, &sig)
                .with_context(|| format!("templates do not cover {intent}/{sig}"))?;
        }
        let nlu = Nlu::new(&catalog, patterns);
        Ok(Engine {
            catalog,
            nlu,
            nlg: Nlg::new(templates),
            config,
        })
    }

    /// Sample catalog and bundled data files.
    pub fn bundled() -> Self {
        Engine::new(
            Catalog::sample(),
            PatternRegistry::bundled(),
            TemplateSet::bundled(),
            PolicyConfig::default(),
        )
        .expect("bundled data is consistent")
    }

    pub fn load(files: &EngineFiles) -> anyhow::Result<Self> {
        let catalog = match &files.catalog {
            Some(path) => {
                let (catalog, report) = Catalog::load_path(path, Some(GenreSynonyms::bundled()))
                    .with_context(|| format!("loading catalog {}", path.display()))?;
                tracing::info!(kept = report.kept, dropped = report.dropped, malformed = report.malformed, "catalog loaded");
                for d in &report.diagnostics {
                    tracing::debug!(line = d.line, "{}", d.message);
                }
                catalog
            }
            None => Catalog::sample(),
        };
        let patterns = match &files.patterns {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                PatternRegistry::from_toml(&text).with_context(|| format!("loading {}", path.display()))?
            }
            None => PatternRegistry::bundled(),
        };
        let templates = match &files.templates {
            Some(path) => TemplateSet::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => TemplateSet::bundled(),
        };
        let config = match &files.policy {
            Some(path) => PolicyConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => PolicyConfig::default(),
        };
        Engine::new(catalog, patterns, templates, config)
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    /// Opens a conversation at the greeting stage.
    pub fn open(&self, id: &str, seed: u64) -> Result<(Conversation, TurnResponse), ServiceError> {
        let conv = Conversation {
            id: id.to_string(),
            seed,
            turns: 0,
            state: initial_state(id, &self.catalog),
            context: DialogueContext::new(),
        };
        let mut response = self.render(&conv, &welcome(), Vec::new())?;
        add_help_hint(&mut response);
        Ok((conv, response))
    }

    /// Checks the input and turns it into user acts without touching the
    /// conversation.
    pub fn interpret(&self, conv: &Conversation, input: &TurnInput) -> Result<Vec<DialogueAct>, ServiceError> {
        let command = input.command().transpose()?;
        if conv.state.is_closed() && !matches!(command, Some(Command::Start | Command::Restart | Command::Help)) {
            return Err(ServiceError::Closed(conv.id.clone()));
        }
        if let Some(command) = command {
            return Ok(command.acts());
        }
        match input {
            TurnInput::Text(text) => {
                if text.chars().count() > MAX_UTTERANCE_CHARS {
                    return Err(ServiceError::Validation(format!(
                        "utterance longer than {MAX_UTTERANCE_CHARS} characters"
                    )));
                }
                if text.trim().is_empty() {
                    return Err(ServiceError::Validation("empty utterance".into()));
                }
                Ok(self.nlu.parse(text, &conv.state))
            }
            TurnInput::Payload(act) => {
                if act.author != Author::User {
                    return Err(ServiceError::Validation("payload must be a user act".into()));
                }
                act.validate()
                    .map_err(|e| ServiceError::Validation(format!("invalid payload: {e}")))?;
                Ok(vec![act.clone()])
            }
        }
    }

    /// Applies already interpreted acts. Replay calls this with the acts
    /// recorded in a transcript.
    pub fn apply(
        &self,
        conv: &mut Conversation,
        input: &TurnInput,
        acts: &[DialogueAct],
    ) -> Result<TurnResponse, ServiceError> {
        let command = input.command().and_then(Result::ok);
        conv.turns += 1;
        if command == Some(Command::Help) {
            let mut response = self.render(conv, &[], Vec::new())?;
            response.utterances = vec![HELP_TEXT.to_string()];
            return Ok(response);
        }
        let outcome = update_state(&conv.state, &conv.context, acts, &self.catalog, &self.config);
        conv.state = outcome.new_state;
        conv.context = outcome.new_context;
        let prefix = match command {
            Some(Command::Restart) => vec![RESTART_NOTICE.to_string()],
            _ => Vec::new(),
        };
        let mut response = self.render(conv, &outcome.agent_acts, prefix)?;
        if command == Some(Command::Start) {
            add_help_hint(&mut response);
        }
        Ok(response)
    }

    /// Both steps of a live turn.
    pub fn step(&self, conv: &mut Conversation, input: &TurnInput) -> Result<(Vec<DialogueAct>, TurnResponse), ServiceError> {
        let acts = self.interpret(conv, input)?;
        let response = self.apply(conv, input, &acts)?;
        Ok((acts, response))
    }

    fn render(&self, conv: &Conversation, acts: &[DialogueAct], prefix: Vec<String>) -> Result<TurnResponse, ServiceError> {
        let mut utterances = prefix;
        utterances.extend(
            self.nlg
                .render_turn(acts, &self.catalog, turn_seed(conv.seed, conv.turns))
                .map_err(|e| ServiceError::Engine(e.to_string()))?,
        );
        let recommendation = acts
            .iter()
            .find(|a| a.intent == Intent::Recommend)
            .and_then(|a| a.item.as_deref())
            .and_then(|id| self.catalog.item(id))
            .map(|item| RecommendationCard {
                item_id: item.id.clone(),
                title: item.title.clone(),
                year: item.release_year,
                rating: item.rating,
                plot: item.plot.clone(),
                item_url: item.item_url.clone(),
                cover_url: item.cover_url.clone(),
            });
        Ok(TurnResponse {
            session_id: conv.id.clone(),
            turn: conv.turns,
            utterances,
            buttons: options_for(&conv.state, &conv.context, &self.catalog),
            agent_stage: conv.state.agent_stage,
            agent_acts: acts.to_vec(),
            recap: self.nlg.recap_for(acts, &conv.state, &self.catalog),
            recommendation,
            closed: conv.state.is_closed(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands_parse() {
        assert!(Command::parse("hello").is_none());
        assert!(matches!(Command::parse(" /Restart "), Some(Ok(Command::Restart))));
        assert!(matches!(Command::parse("/bogus"), Some(Err(ServiceError::Validation(_)))));
    }

    #[test]
    fn opening_has_welcome_and_hint() {
        let engine = Engine::bundled();
        let (conv, response) = engine.open("s", 1).unwrap();
        assert_eq!(conv.state.agent_stage, AgentStage::Greeting);
        assert_eq!(response.agent_acts, welcome());
        assert!(response.utterances.iter().any(|u| u.contains("/help")));
    }

    #[test]
    fn hint_added_when_templates_lack_it() {
        let mut templates = String::new();
        for (intent, sig) in policy_signatures(&PolicyConfig::default()) {
            templates.push_str(&format!(
                "[[templates]]\nintent = \"{}\"\nsignature = \"{sig}\"\ntexts = [\"x\"]\n",
                intent.as_str()
            ));
        }
        let engine = Engine::new(
            Catalog::sample(),
            PatternRegistry::bundled(),
            TemplateSet::from_toml(&templates).unwrap(),
            PolicyConfig::default(),
        )
        .unwrap();
        let (_, response) = engine.open("s", 1).unwrap();
        assert_eq!(response.utterances, ["x", HELP_HINT]);
    }

    #[test]
    fn help_leaves_state_alone() {
        let engine = Engine::bundled();
        let (mut conv, _) = engine.open("s", 1).unwrap();
        let before = conv.state.clone();
        let (acts, response) = engine.step(&mut conv, &TurnInput::Text("/help".into())).unwrap();
        assert!(acts.is_empty());
        assert_eq!(response.utterances, [HELP_TEXT]);
        assert_eq!(conv.state, before);
    }

    #[test]
    fn oversized_text_rejected() {
        let engine = Engine::bundled();
        let (conv, _) = engine.open("s", 1).unwrap();
        let long = "a".repeat(MAX_UTTERANCE_CHARS + 1);
        assert!(matches!(engine.interpret(&conv, &TurnInput::Text(long)), Err(ServiceError::Validation(_))));
        let ok = "é".repeat(MAX_UTTERANCE_CHARS);
        assert!(engine.interpret(&conv, &TurnInput::Text(ok)).is_ok());
    }

    #[test]
    fn agent_payload_rejected() {
        let engine = Engine::bundled();
        let (conv, _) = engine.open("s", 1).unwrap();
        let input = TurnInput::Payload(DialogueAct::agent(Intent::Welcome));
        assert!(matches!(engine.interpret(&conv, &input), Err(ServiceError::Validation(_))));
    }

    #[test]
    fn closed_conversation_accepts_only_restart() {
        let engine = Engine::bundled();
        let (mut conv, _) = engine.open("s", 1).unwrap();
        engine.step(&mut conv, &TurnInput::Text("/exit".into())).unwrap();
        assert!(conv.state.is_closed());
        assert!(matches!(engine.interpret(&conv, &TurnInput::Text("hi".into())), Err(ServiceError::Closed(_))));
        let (_, response) = engine.step(&mut conv, &TurnInput::Text("/restart".into())).unwrap();
        assert_eq!(response.utterances[0], RESTART_NOTICE);
        assert_eq!(conv.state.agent_stage, AgentStage::Greeting);
    }
}
