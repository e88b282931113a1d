//! Catalog ingestion: one JSON object per line, validated record by record.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::item::{Item, MAX_YEAR, MIN_YEAR};
use super::CatalogError;
use crate::model::canonical_text;

/// Per-record problem found while loading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

/// Summary of a catalog load.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub kept: usize,
    /// Records dropped because an essential attribute was missing or invalid.
    pub dropped: usize,
    /// Records that could not be parsed at all.
    pub malformed: usize,
    pub diagnostics: Vec<Diagnostic>,
    /// Synonym table keys that are not genres of any surviving item.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_synonym_genres: Vec<String>,
}

/// Canonical genre to the phrases that also denote it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenreSynonyms {
    #[serde(default)]
    pub synonyms: BTreeMap<String, BTreeSet<String>>,
}

impl GenreSynonyms {
    pub fn from_toml(text: &str) -> Result<Self, CatalogError> {
        let raw: GenreSynonyms =
            toml::from_str(text).map_err(|e| CatalogError::Synonyms(e.to_string()))?;
        Ok(GenreSynonyms {
            synonyms: raw
                .synonyms
                .into_iter()
                .map(|(genre, syns)| {
                    (
                        canonical_text(&genre),
                        syns.iter().map(|s| canonical_text(s)).filter(|s| !s.is_empty()).collect(),
                    )
                })
                .collect(),
        })
    }

    /// The bundled table.
    pub fn bundled() -> Self {
        Self::from_toml(include_str!("../../data/genre_synonyms.toml"))
            .expect("bundled synonym table parses")
    }
}

/// Lenient mirror of [`Item`] so that missing essentials can be reported
/// instead of failing the parse.
#[derive(Deserialize)]
struct RawItem {
    id: Option<String>,
    title: Option<String>,
    #[serde(default)]
    genres: Vec<String>,
    #[serde(default)]
    keywords: Vec<String>,
    #[serde(default)]
    actors: Vec<String>,
    #[serde(default)]
    directors: Vec<String>,
    release_year: Option<i64>,
    duration: Option<u32>,
    rating: Option<f64>,
    #[serde(default)]
    votes: u64,
    #[serde(default)]
    plot: String,
    #[serde(default)]
    item_url: String,
    #[serde(default)]
    cover_url: String,
}

fn clean(list: Vec<String>) -> Vec<String> {
    list.into_iter()
        .map(|s| s.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|s| !s.is_empty())
        .collect()
}

impl RawItem {
    fn validate(self) -> Result<Item, String> {
        let id = self.id.map(|s| s.trim().to_string()).unwrap_or_default();
        if id.is_empty() {
            return Err("missing id".into());
        }
        let title = self.title.map(|s| s.trim().to_string()).unwrap_or_default();
        if title.is_empty() {
            return Err(format!("{id}: missing title"));
        }
        let genres = clean(self.genres);
        if genres.is_empty() {
            return Err(format!("{id}: missing genres"));
        }
        let release_year = match self.release_year {
            Some(y) if (MIN_YEAR..=MAX_YEAR).contains(&y) => y,
            Some(y) => return Err(format!("{id}: release_year {y} out of range")),
            None => return Err(format!("{id}: missing release_year")),
        };
        let rating = match self.rating {
            Some(r) if (0.0..=10.0).contains(&r) => r,
            Some(r) => return Err(format!("{id}: rating {r} out of range")),
            None => return Err(format!("{id}: missing rating")),
        };
        Ok(Item {
            id,
            title,
            genres,
            keywords: clean(self.keywords),
            actors: clean(self.actors),
            directors: clean(self.directors),
            release_year,
            duration: self.duration.filter(|d| *d > 0),
            rating,
            votes: self.votes,
            plot: self.plot.trim().to_string(),
            item_url: self.item_url,
            cover_url: self.cover_url,
        })
    }
}

/// Parses and validates records. Returns surviving items in file order.
pub(crate) fn read_items<R: BufRead>(source: R) -> Result<(Vec<Item>, LoadReport), CatalogError> {
    let mut report = LoadReport::default();
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let raw: RawItem = match serde_json::from_str(trimmed) {
            Ok(raw) => raw,
            Err(e) => {
                report.malformed += 1;
                report.diagnostics.push(Diagnostic {
                    line: line_no,
                    message: format!("malformed record: {e}"),
                });
                continue;
            }
        };
        match raw.validate() {
            Ok(item) if !seen.insert(item.id.clone()) => {
                report.dropped += 1;
                report.diagnostics.push(Diagnostic {
                    line: line_no,
                    message: format!("{}: duplicate id", item.id),
                });
            }
            Ok(item) => items.push(item),
            Err(message) => {
                report.dropped += 1;
                report.diagnostics.push(Diagnostic {
                    line: line_no,
                    message,
                });
            }
        }
    }
    report.kept = items.len();
    if items.is_empty() {
        return Err(CatalogError::Empty(report));
    }
    Ok((items, report))
}
