//! Template-based response generation, preference recaps and button options.

pub mod options;
mod recap;
mod templates;

pub use options::{options_for, ButtonSpec};
pub use recap::{summarize_in, EMPTY_RECAP};
pub use templates::{placeholders, TemplateSet, PLACEHOLDERS};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, Item};
use crate::manager::{inquirable_slots, PolicyConfig};
use crate::model::{DialogueAct, DialogueState, Intent, SlotName, Value};

#[derive(Debug, Error)]
pub enum NlgError {
    #[error("invalid template file: {0}")]
    Parse(String),
    #[error("no template for {intent}/{signature}")]
    MissingTemplate { intent: Intent, signature: String },
    #[error("unbalanced braces in template `{0}`")]
    BadTemplate(String),
    #[error("unknown placeholder `{0}`")]
    UnknownPlaceholder(String),
    #[error("placeholder `{placeholder}` has no value in `{template}`")]
    Unbound { placeholder: String, template: String },
    #[error("templates are only for agent intents, got {0}")]
    NotAgentIntent(Intent),
}

/// When the information-need recap accompanies a turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecapMode {
    #[default]
    Elicit,
    EveryTurn,
    Never,
}

/// Template key of an act.
pub fn signature(act: &DialogueAct) -> String {
    match act.intent {
        Intent::Elicit => act.asked_slot().map_or("default", SlotName::as_str).to_string(),
        Intent::Inform => act
            .constraints
            .first()
            .map_or("overview", |c| c.slot.as_str())
            .to_string(),
        Intent::NoResults if act.count.unwrap_or(0) > 0 => "exhausted".into(),
        Intent::NoResults => "none".into(),
        _ => "default".into(),
    }
}

/// Every `(intent, signature)` the dialogue policy can produce under `config`.
pub fn policy_signatures(config: &PolicyConfig) -> Vec<(Intent, String)> {
    let mut out: Vec<(Intent, String)> = [
        Intent::Welcome,
        Intent::TooManyResults,
        Intent::Recommend,
        Intent::Acknowledge,
        Intent::CantHelp,
        Intent::Bye,
    ]
    .into_iter()
    .map(|i| (i, "default".to_string()))
    .collect();
    out.push((Intent::NoResults, "none".into()));
    out.push((Intent::NoResults, "exhausted".into()));
    out.push((Intent::Inform, "overview".into()));
    out.extend(inquirable_slots().into_iter().map(|s| (Intent::Inform, s.as_str().to_string())));
    out.extend(config.elicitation_order.iter().map(|s| (Intent::Elicit, s.as_str().to_string())));
    out
}

/// Joins display values as "a, b and c".
pub fn join_list(values: &[String]) -> String {
    match values {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Display form of a constraint value.
pub fn display_value(catalog: &Catalog, slot: SlotName, value: &Value) -> String {
    match (slot, value) {
        (SlotName::Genres | SlotName::Keywords, Value::Text(t)) => t.clone(),
        (SlotName::Actors | SlotName::Directors, Value::Text(t)) => catalog
            .display(slot, t)
            .or_else(|| catalog.display(SlotName::Actors, t))
            .or_else(|| catalog.display(SlotName::Directors, t))
            .map_or_else(|| t.clone(), str::to_string),
        (_, Value::Text(t)) => catalog.display(slot, t).map_or_else(|| t.clone(), str::to_string),
        (_, Value::Decimal(d)) => format!("{d:.1}"),
        (_, other) => other.to_string(),
    }
}

fn item_bindings(item: &Item, out: &mut BTreeMap<&'static str, String>) {
    let lower = |v: &[String]| v.iter().map(|s| s.to_lowercase()).collect::<Vec<_>>();
    let or_unknown = |s: String| if s.is_empty() { "unknown".to_string() } else { s };
    out.insert("title", item.title.clone());
    out.insert("year", item.release_year.to_string());
    out.insert("rating", format!("{:.1}", item.rating));
    out.insert("plot", or_unknown(item.plot.clone()));
    out.insert("genres", join_list(&lower(&item.genres)));
    out.insert("keywords", or_unknown(join_list(&lower(&item.keywords))));
    out.insert("directors", or_unknown(join_list(&item.directors)));
    out.insert("actors", or_unknown(join_list(&item.actors)));
    out.insert("duration", item.duration.map_or_else(|| "unknown".into(), |d| d.to_string()));
}

/// Renders acts into text with randomly chosen templates.
#[derive(Debug, Clone)]
pub struct Nlg {
    templates: TemplateSet,
    pub recap: RecapMode,
}

impl Nlg {
    pub fn new(templates: TemplateSet) -> Self {
        Nlg {
            templates,
            recap: RecapMode::default(),
        }
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    /// Values available to the templates of one act.
    pub fn bindings(&self, act: &DialogueAct, catalog: &Catalog) -> BTreeMap<&'static str, String> {
        let mut out = BTreeMap::new();
        if let Some(item) = act.item.as_deref().and_then(|id| catalog.item(id)) {
            item_bindings(item, &mut out);
        }
        if let Some(count) = act.count {
            out.insert("count", count.to_string());
        }
        if let Some(c) = act.constraints.first() {
            out.insert("slot", c.slot.label().to_string());
        }
        if act.intent == Intent::Inform {
            if let Some(slot) = act.constraints.first().map(|c| c.slot) {
                let item = act.item.as_deref().and_then(|id| catalog.item(id));
                let values: Vec<String> = match (slot, item) {
                    (SlotName::Plot | SlotName::Title, Some(item)) => {
                        item.display_values(slot).into_iter().map(str::to_string).collect()
                    }
                    _ => act.constraints.iter().map(|c| display_value(catalog, slot, &c.value)).collect(),
                };
                out.insert("value", join_list(&values));
            }
        }
        out
    }

    /// Renders one act with a generator seeded by `seed`.
    pub fn render(&self, act: &DialogueAct, catalog: &Catalog, seed: u64) -> Result<String, NlgError> {
        self.render_with(act, catalog, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Renders a turn's acts in order, drawing from one seeded generator.
    pub fn render_turn(&self, acts: &[DialogueAct], catalog: &Catalog, seed: u64) -> Result<Vec<String>, NlgError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        acts.iter().map(|a| self.render_with(a, catalog, &mut rng)).collect()
    }

    fn render_with(&self, act: &DialogueAct, catalog: &Catalog, rng: &mut ChaCha8Rng) -> Result<String, NlgError> {
        let texts = self.templates.get(act.intent, &signature(act))?;
        let template = &texts[rng.gen_range(0..texts.len())];
        fill(template, &self.bindings(act, catalog))
    }

    /// Recap text for a turn, if the recap mode calls for one.
    pub fn recap_for(&self, acts: &[DialogueAct], state: &DialogueState, catalog: &Catalog) -> Option<String> {
        let show = match self.recap {
            RecapMode::Never => false,
            RecapMode::EveryTurn => true,
            RecapMode::Elicit => acts.iter().any(|a| a.intent == Intent::Elicit),
        };
        show.then(|| summarize_in(&state.info_need, catalog))
    }
}

/// Substitutes placeholders; any hole without a binding is an error.
pub fn fill(template: &str, bindings: &BTreeMap<&'static str, String>) -> Result<String, NlgError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| NlgError::BadTemplate(template.to_string()))?;
        let name = &after[..close];
        let value = bindings.get(name).ok_or_else(|| NlgError::Unbound {
            placeholder: name.to_string(),
            template: template.to_string(),
        })?;
        out.push_str(value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}
