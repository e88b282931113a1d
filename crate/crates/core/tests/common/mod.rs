//! Oracles, generators and the conversation simulator shared by the
//! integration tests and the acceptance suite.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use cinebot_core::catalog::Item;
use cinebot_core::manager::{initial_state, is_flow_edge, update_state, PolicyConfig};
use cinebot_core::{
    AgentStage, Catalog, Constraint, DialogueAct, DialogueContext, DialogueState, FeedbackLabel, InformationNeed,
    Intent, Operator, SlotName, Value,
};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Deserialize;

// ------------------------------------------------------------------ golden

#[derive(Debug, Deserialize)]
pub struct GoldenCase {
    pub utterance: String,
    pub stage: AgentStage,
    #[serde(default)]
    pub recommendation: Option<String>,
    /// Slot of a pending agent question.
    #[serde(default)]
    pub pending: Option<SlotName>,
    pub expected: Vec<DialogueAct>,
}

impl GoldenCase {
    pub fn state(&self) -> DialogueState {
        let mut st = DialogueState::new("golden");
        st.agent_stage = self.stage;
        st.current_recommendation = self.recommendation.clone();
        if let Some(slot) = self.pending {
            st.last_agent_acts = vec![DialogueAct::elicit(slot)];
        }
        st
    }
}

pub fn golden_cases() -> Vec<GoldenCase> {
    include_str!("../data/nlu_golden.jsonl")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("golden record parses"))
        .collect()
}

// ------------------------------------------------------------------ filter oracle

fn fold(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn text_attr(item: &Item, slot: SlotName) -> Vec<String> {
    let raw: Vec<&String> = match slot {
        SlotName::Genres => item.genres.iter().collect(),
        SlotName::Keywords => item.keywords.iter().collect(),
        SlotName::Actors => item.actors.iter().collect(),
        SlotName::Directors => item.directors.iter().collect(),
        SlotName::Title => vec![&item.title],
        SlotName::Plot => vec![&item.plot],
        _ => vec![],
    };
    raw.into_iter().map(|s| fold(s)).collect()
}

fn num_attr(item: &Item, slot: SlotName) -> Option<f64> {
    match slot {
        SlotName::ReleaseYear => Some(item.release_year as f64),
        SlotName::Duration => item.duration.map(|d| d as f64),
        SlotName::Rating => Some(item.rating),
        _ => None,
    }
}

/// Brute-force check of one constraint against one item.
pub fn oracle_constraint(item: &Item, slot: SlotName, op: Operator, value: &Value) -> bool {
    if let Some(rhs) = value.as_f64() {
        let Some(lhs) = num_attr(item, slot) else {
            return false;
        };
        return match op {
            Operator::Eq => lhs == rhs,
            Operator::Neq => lhs != rhs,
            Operator::Lt => lhs < rhs,
            Operator::Gt => lhs > rhs,
            Operator::Leq => lhs <= rhs,
            Operator::Geq => lhs >= rhs,
        };
    }
    let Value::Text(v) = value else {
        return true;
    };
    let attrs = text_attr(item, slot);
    let present = if slot == SlotName::Plot {
        attrs.iter().any(|p| p.contains(v.as_str()))
    } else {
        attrs.iter().any(|a| a == v)
    };
    match op {
        Operator::Eq => present,
        Operator::Neq => !present,
        _ => false,
    }
}

pub fn oracle_satisfies(item: &Item, need: &InformationNeed) -> bool {
    need.iter()
        .filter(|c| !need.dont_care.contains(&c.slot))
        .all(|c| oracle_constraint(item, c.slot, c.op, &c.value))
}

/// Matching ids ordered by rating, then votes (both descending), then id.
pub fn oracle_filter(catalog: &Catalog, need: &InformationNeed) -> Vec<String> {
    let mut hits: Vec<&Item> = catalog.items().filter(|i| oracle_satisfies(i, need)).collect();
    hits.sort_by(|a, b| {
        b.rating
            .partial_cmp(&a.rating)
            .unwrap_or(Ordering::Equal)
            .then(b.votes.cmp(&a.votes))
            .then(a.id.cmp(&b.id))
    });
    hits.into_iter().map(|i| i.id.clone()).collect()
}

pub fn oracle_count(catalog: &Catalog, need: &InformationNeed) -> usize {
    catalog.items().filter(|i| oracle_satisfies(i, need)).count()
}

// ------------------------------------------------------------------ generators

const TEXT_SLOTS: [SlotName; 6] = [
    SlotName::Genres,
    SlotName::Keywords,
    SlotName::Actors,
    SlotName::Directors,
    SlotName::Title,
    SlotName::Plot,
];
const NUM_SLOTS: [SlotName; 3] = [SlotName::ReleaseYear, SlotName::Duration, SlotName::Rating];

/// A constraint whose value comes from a random catalog item, so that
/// random needs actually hit items.
pub fn random_constraint<R: Rng>(rng: &mut R, catalog: &Catalog) -> Constraint {
    let items: Vec<&Item> = catalog.items().collect();
    loop {
        let item = items.choose(rng).unwrap();
        if rng.gen_bool(0.6) {
            let slot = *TEXT_SLOTS.choose(rng).unwrap();
            let values = item.values(slot);
            let Some(mut value) = values.choose(rng).cloned() else { continue };
            if slot == SlotName::Plot {
                // a word of the plot
                let text = value.as_text().unwrap().to_string();
                let words: Vec<&str> = text.split_whitespace().collect();
                value = Value::text(words.choose(rng).unwrap());
            }
            let op = if rng.gen_bool(0.8) { Operator::Eq } else { Operator::Neq };
            return Constraint::new(slot, op, value).unwrap();
        }
        let slot = *NUM_SLOTS.choose(rng).unwrap();
        let Some(value) = item.values(slot).into_iter().next() else { continue };
        let op = *Operator::ALL.choose(rng).unwrap();
        return Constraint::new(slot, op, value).unwrap();
    }
}

pub fn random_need<R: Rng>(rng: &mut R, catalog: &Catalog) -> InformationNeed {
    let mut need = InformationNeed::new();
    for _ in 0..rng.gen_range(0..=4) {
        need.insert(random_constraint(rng, catalog)).unwrap();
    }
    if rng.gen_bool(0.2) {
        let slot = *SlotName::ALL.choose(rng).unwrap();
        need.insert(Constraint::dont_care(slot)).unwrap();
    }
    need
}

fn inquirable() -> [Option<SlotName>; 9] {
    [
        None,
        Some(SlotName::Genres),
        Some(SlotName::Plot),
        Some(SlotName::Directors),
        Some(SlotName::Actors),
        Some(SlotName::Duration),
        Some(SlotName::Rating),
        Some(SlotName::ReleaseYear),
        Some(SlotName::Keywords),
    ]
}

/// A random user act, loosely biased towards what makes sense at the stage.
pub fn random_user_act<R: Rng>(rng: &mut R, catalog: &Catalog, state: &DialogueState) -> DialogueAct {
    let with_item = |act: DialogueAct| match &state.current_recommendation {
        Some(id) => act.with_item(id.clone()),
        None => act,
    };
    match rng.gen_range(0..100) {
        0..=29 => {
            let n = rng.gen_range(1..=2);
            DialogueAct::reveal((0..n).map(|_| random_constraint(rng, catalog)).collect())
        }
        30..=36 => {
            let held: Vec<Constraint> = state.info_need.iter().collect();
            let c = held.choose(rng).cloned().unwrap_or_else(|| random_constraint(rng, catalog));
            DialogueAct::remove(vec![c])
        }
        37..=44 => match state.pending_elicit() {
            Some(slot) if rng.gen_bool(0.5) => DialogueAct::reveal(vec![Constraint::dont_care(slot)]),
            _ => DialogueAct::user(Intent::Deny),
        },
        45..=52 => with_item(DialogueAct::user(Intent::Accept)),
        53..=62 => {
            let label = *[FeedbackLabel::Rejected, FeedbackLabel::DontLike, FeedbackLabel::Watched]
                .choose(rng)
                .unwrap();
            with_item(DialogueAct::user(Intent::Reject).with_feedback(label))
        }
        63..=72 => with_item(DialogueAct::inquire(*inquirable().choose(rng).unwrap())),
        73..=80 => DialogueAct::user(Intent::ContinueRecommendation),
        81..=84 => DialogueAct::user(Intent::Hi),
        85..=89 => DialogueAct::user(Intent::Acknowledge),
        90..=93 => DialogueAct::user(Intent::Unrecognized),
        94..=96 => DialogueAct::user(Intent::Restart),
        _ => DialogueAct::user(Intent::Bye),
    }
}

// ------------------------------------------------------------------ simulation

#[derive(Debug, Default)]
pub struct SimReport {
    pub conversations: usize,
    pub turns: usize,
    pub violations: Vec<String>,
    pub transitions: BTreeMap<(AgentStage, AgentStage), usize>,
    /// Longest run of agent turns from the last user reveal to a
    /// recommendation, no-results or goodbye.
    pub longest_tail: usize,
    /// Every agent act, in order, for determinism checks.
    pub agent_trace: Vec<Vec<DialogueAct>>,
}

impl SimReport {
    pub fn count_violation(&self) -> usize {
        self.violations.len()
    }
}

fn terminal(acts: &[DialogueAct]) -> bool {
    acts.iter()
        .any(|a| matches!(a.intent, Intent::Recommend | Intent::NoResults | Intent::Bye))
}

struct Conversation<'a> {
    catalog: &'a Catalog,
    config: &'a PolicyConfig,
    state: DialogueState,
    context: DialogueContext,
    id: usize,
}

impl Conversation<'_> {
    /// Runs one turn and checks every per-turn invariant.
    fn turn(&mut self, act: DialogueAct, report: &mut SimReport) -> Vec<DialogueAct> {
        let out = update_state(&self.state, &self.context, std::slice::from_ref(&act), self.catalog, self.config);
        let tag = format!("conversation {} turn {}", self.id, report.turns);
        let mut fail = |msg: String| report.violations.push(format!("{tag}: {msg} (user act {act})"));

        if out.agent_acts.is_empty() {
            fail("no agent act".into());
        }
        for a in &out.agent_acts {
            if let Err(e) = a.validate() {
                fail(format!("invalid agent act {a}: {e}"));
            }
            match a.intent {
                // (a) never recommend an item with feedback
                Intent::Recommend => {
                    let id = a.item.as_deref().unwrap_or_default();
                    if out.new_context.contains(id) {
                        fail(format!("re-recommended {id}"));
                    }
                }
                // (c) disclosed counts are exact
                Intent::TooManyResults => {
                    let expected = oracle_count(self.catalog, &out.new_state.info_need) as u64;
                    if a.count != Some(expected) {
                        fail(format!("too_many_results count {:?}, oracle {expected}", a.count));
                    }
                }
                Intent::Elicit => {
                    let slot = a.asked_slot().unwrap();
                    let need = &out.new_state.info_need;
                    if need.is_constrained(slot) || need.dont_care.contains(&slot) {
                        fail(format!("elicited constrained slot {slot}"));
                    }
                }
                _ => {}
            }
        }
        // (b) bounded elicitation, plus the structural state invariants
        if let Err(e) = out.new_state.check_invariants(self.config.max_elicit_questions) {
            fail(e);
        }
        if out.new_state.match_count != oracle_count(self.catalog, &out.new_state.info_need) {
            fail("stale match count".into());
        }
        let edge = (self.state.agent_stage, out.new_state.agent_stage);
        if !is_flow_edge(edge.0, edge.1) {
            fail(format!("stage change {} -> {} is not a flow edge", edge.0, edge.1));
        }
        *report.transitions.entry(edge).or_default() += 1;
        report.turns += 1;
        report.agent_trace.push(out.agent_acts.clone());
        self.state = out.new_state;
        self.context = out.new_context;
        out.agent_acts
    }
}

/// Runs `n` random conversations. Each consists of random user acts followed
/// by one last reveal and cooperative "no preference" answers; the number of
/// agent turns from that reveal to a recommendation (or no-results, or
/// goodbye) is checked against `max_elicit_questions + 3`.
pub fn simulate<R: Rng>(rng: &mut R, catalog: &Catalog, config: &PolicyConfig, n: usize) -> SimReport {
    let mut report = SimReport::default();
    let bound = config.max_elicit_questions as usize + 3;
    for id in 0..n {
        let mut conv = Conversation {
            catalog,
            config,
            state: initial_state(format!("sim-{id}"), catalog),
            context: DialogueContext::new(),
            id,
        };
        let len = rng.gen_range(1..=14);
        for _ in 0..len {
            if conv.state.is_closed() {
                break;
            }
            let act = random_user_act(rng, catalog, &conv.state);
            conv.turn(act, &mut report);
        }
        if !conv.state.is_closed() {
            let reveal = DialogueAct::reveal(vec![random_constraint(rng, catalog)]);
            let mut acts = conv.turn(reveal, &mut report);
            let mut agent_turns = 1;
            while !terminal(&acts) && agent_turns <= bound {
                acts = conv.turn(DialogueAct::user(Intent::Deny), &mut report);
                agent_turns += 1;
            }
            report.longest_tail = report.longest_tail.max(agent_turns);
            if !terminal(&acts) {
                report
                    .violations
                    .push(format!("conversation {id}: no recommendation within {bound} agent turns of the last reveal"));
            }
        }
        report.conversations += 1;
    }
    report
}
