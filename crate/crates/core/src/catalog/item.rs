use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{canonical_text, ItemId, SlotName, Value};

pub const MIN_YEAR: i64 = 1870;
pub const MAX_YEAR: i64 = 2100;

/// A movie record as stored in the catalog file, in display form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub title: String,
    pub genres: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub actors: Vec<String>,
    #[serde(default)]
    pub directors: Vec<String>,
    pub release_year: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<u32>,
    pub rating: f64,
    #[serde(default)]
    pub votes: u64,
    #[serde(default)]
    pub plot: String,
    #[serde(default)]
    pub item_url: String,
    #[serde(default)]
    pub cover_url: String,
}

impl Item {
    /// Display strings of a text-valued attribute.
    pub fn display_values(&self, slot: SlotName) -> Vec<&str> {
        match slot {
            SlotName::Genres => self.genres.iter().map(String::as_str).collect(),
            SlotName::Keywords => self.keywords.iter().map(String::as_str).collect(),
            SlotName::Actors => self.actors.iter().map(String::as_str).collect(),
            SlotName::Directors => self.directors.iter().map(String::as_str).collect(),
            SlotName::Title => vec![self.title.as_str()],
            SlotName::Plot if !self.plot.is_empty() => vec![self.plot.as_str()],
            _ => Vec::new(),
        }
    }

    /// Canonical values of an attribute, as they would appear in constraints.
    pub fn values(&self, slot: SlotName) -> Vec<Value> {
        match slot {
            SlotName::ReleaseYear => vec![Value::Int(self.release_year)],
            SlotName::Duration => self.duration.map(|d| Value::Int(d.into())).into_iter().collect(),
            SlotName::Rating => vec![Value::Decimal(self.rating)],
            _ => {
                let mut seen = BTreeSet::new();
                self.display_values(slot)
                    .into_iter()
                    .map(canonical_text)
                    .filter(|v| !v.is_empty() && seen.insert(v.clone()))
                    .map(Value::Text)
                    .collect()
            }
        }
    }
}

/// Precomputed canonical forms used by filtering.
#[derive(Debug, Clone)]
pub(crate) struct Indexed {
    pub item: Item,
    pub genres: BTreeSet<String>,
    pub keywords: BTreeSet<String>,
    pub actors: BTreeSet<String>,
    pub directors: BTreeSet<String>,
    pub title: String,
    pub plot: String,
}

fn canon_set(values: &[String]) -> BTreeSet<String> {
    values
        .iter()
        .map(|v| canonical_text(v))
        .filter(|v| !v.is_empty())
        .collect()
}

impl Indexed {
    pub fn new(item: Item) -> Self {
        Indexed {
            genres: canon_set(&item.genres),
            keywords: canon_set(&item.keywords),
            actors: canon_set(&item.actors),
            directors: canon_set(&item.directors),
            title: canonical_text(&item.title),
            plot: canonical_text(&item.plot),
            item,
        }
    }

    pub fn set(&self, slot: SlotName) -> Option<&BTreeSet<String>> {
        match slot {
            SlotName::Genres => Some(&self.genres),
            SlotName::Keywords => Some(&self.keywords),
            SlotName::Actors => Some(&self.actors),
            SlotName::Directors => Some(&self.directors),
            _ => None,
        }
    }
}
