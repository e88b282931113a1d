use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::NlgError;
use crate::model::Intent;

/// Placeholder names a template may use.
pub const PLACEHOLDERS: [&str; 12] = [
    "count", "slot", "value", "title", "year", "rating", "plot", "genres", "directors", "actors", "duration",
    "keywords",
];

/// Templates keyed by `(intent, signature)`, each with its alternatives in
/// file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    entries: BTreeMap<(Intent, String), Vec<String>>,
}

#[derive(Deserialize)]
struct RawFile {
    templates: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    intent: Intent,
    signature: String,
    texts: Vec<String>,
}

/// Names of the `{...}` holes in a template.
pub fn placeholders(template: &str) -> Result<Vec<&str>, NlgError> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| NlgError::BadTemplate(template.to_string()))?;
        out.push(&after[..close]);
        rest = &after[close + 1..];
    }
    if rest.contains('}') {
        return Err(NlgError::BadTemplate(template.to_string()));
    }
    Ok(out)
}

impl TemplateSet {
    pub fn from_toml(text: &str) -> Result<Self, NlgError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| NlgError::Parse(e.to_string()))?;
        let mut entries: BTreeMap<(Intent, String), Vec<String>> = BTreeMap::new();
        for e in raw.templates {
            if !Intent::AGENT.contains(&e.intent) {
                return Err(NlgError::NotAgentIntent(e.intent));
            }
            if e.texts.is_empty() {
                return Err(NlgError::MissingTemplate {
                    intent: e.intent,
                    signature: e.signature,
                });
            }
            for t in &e.texts {
                for p in placeholders(t)? {
                    if !PLACEHOLDERS.contains(&p) {
                        return Err(NlgError::UnknownPlaceholder(p.to_string()));
                    }
                }
            }
            entries.entry((e.intent, e.signature)).or_default().extend(e.texts);
        }
        Ok(TemplateSet { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NlgError> {
        let text = std::fs::read_to_string(path).map_err(|e| NlgError::Parse(e.to_string()))?;
        Self::from_toml(&text)
    }

    pub fn bundled() -> Self {
        Self::from_toml(include_str!("../../data/templates.toml")).expect("bundled templates are valid")
    }

    pub fn get(&self, intent: Intent, signature: &str) -> Result<&[String], NlgError> {
        self.entries
            .get(&(intent, signature.to_string()))
            .map(Vec::as_slice)
            .ok_or_else(|| NlgError::MissingTemplate {
                intent,
                signature: signature.to_string(),
            })
    }

    pub fn keys(&self) -> impl Iterator<Item = (Intent, &str)> {
        self.entries.keys().map(|(i, s)| (*i, s.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholder_scan() {
        assert_eq!(placeholders("a {x} b {y}").unwrap(), ["x", "y"]);
        assert!(placeholders("a {x").is_err());
        assert!(placeholders("a } b").is_err());
    }

    #[test]
    fn unknown_placeholder_rejected() {
        let text = "[[templates]]\nintent = \"bye\"\nsignature = \"default\"\ntexts = [\"bye {name}\"]\n";
        assert!(matches!(TemplateSet::from_toml(text), Err(NlgError::UnknownPlaceholder(p)) if p == "name"));
    }

    #[test]
    fn user_intent_rejected() {
        let text = "[[templates]]\nintent = \"hi\"\nsignature = \"default\"\ntexts = [\"x\"]\n";
        assert!(matches!(TemplateSet::from_toml(text), Err(NlgError::NotAgentIntent(Intent::Hi))));
    }

    #[test]
    fn keyword_elicit_pair_is_bundled() {
        let set = TemplateSet::bundled();
        assert_eq!(
            set.get(Intent::Elicit, "keywords").unwrap(),
            [
                "Can you give me a few keywords?",
                "What are you looking for in a movie? Some keywords would be good."
            ]
        );
    }
}
