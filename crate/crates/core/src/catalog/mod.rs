//! Item collection: ingestion, per-slot value lexicons and constraint
//! filtering.
//!
//! Items are kept in a fixed canonical ranking (rating descending, then votes
//! descending, then id ascending). Every query returns ids in that order.

mod filter;
mod item;
mod load;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufReader, Read};
use std::path::Path;

use thiserror::Error;

pub use filter::{item_satisfies, MatchMode};
pub use item::{Item, MAX_YEAR, MIN_YEAR};
pub use load::{Diagnostic, GenreSynonyms, LoadReport};

use crate::model::{canonical_text, InformationNeed, ItemId, SlotName};
use item::Indexed;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog has no valid items ({} dropped, {} malformed)", .0.dropped, .0.malformed)]
    Empty(LoadReport),
    #[error("invalid synonym table: {0}")]
    Synonyms(String),
    #[error("slot {0} has no lexicon")]
    NotLexiconSlot(SlotName),
}

/// Immutable, validated item collection.
#[derive(Debug, Clone)]
pub struct Catalog {
    /// Ranked.
    items: Vec<Indexed>,
    by_id: HashMap<ItemId, usize>,
    lexicons: BTreeMap<SlotName, BTreeSet<String>>,
    synonyms: BTreeMap<String, BTreeSet<String>>,
    display: HashMap<(SlotName, String), String>,
}

/// Canonical ranking: rating descending, votes descending, id ascending.
pub fn rank_order(a: &Item, b: &Item) -> Ordering {
    b.rating
        .total_cmp(&a.rating)
        .then_with(|| b.votes.cmp(&a.votes))
        .then_with(|| a.id.cmp(&b.id))
}

impl Catalog {
    /// Loads newline-delimited JSON records. Records missing an essential
    /// attribute (title, genres, release_year, rating) are dropped and
    /// counted in the report.
    pub fn load<R: Read>(
        source: R,
        synonyms: Option<GenreSynonyms>,
    ) -> Result<(Catalog, LoadReport), CatalogError> {
        let (items, mut report) = load::read_items(BufReader::new(source))?;
        let catalog = Catalog::build(items, synonyms.unwrap_or_default(), &mut report);
        Ok((catalog, report))
    }

    pub fn load_path(
        path: impl AsRef<Path>,
        synonyms: Option<GenreSynonyms>,
    ) -> Result<(Catalog, LoadReport), CatalogError> {
        Catalog::load(std::fs::File::open(path)?, synonyms)
    }

    /// The bundled desk-scale sample with the bundled synonym table.
    pub fn sample() -> Catalog {
        let data = include_str!("../../data/catalog.jsonl");
        Catalog::load(data.as_bytes(), Some(GenreSynonyms::bundled()))
            .expect("bundled catalog loads")
            .0
    }

    /// Builds a catalog from already constructed items. Items failing the
    /// essential-attribute checks are dropped.
    pub fn from_items(items: Vec<Item>, synonyms: Option<GenreSynonyms>) -> Result<Catalog, CatalogError> {
        let lines: Vec<String> = items
            .iter()
            .map(|i| serde_json::to_string(i).expect("items serialize"))
            .collect();
        Ok(Catalog::load(lines.join("\n").as_bytes(), synonyms)?.0)
    }

    fn build(mut items: Vec<Item>, synonyms: GenreSynonyms, report: &mut LoadReport) -> Catalog {
        let mut display = HashMap::new();
        for item in &items {
            for slot in [
                SlotName::Genres,
                SlotName::Keywords,
                SlotName::Actors,
                SlotName::Directors,
                SlotName::Title,
                SlotName::Plot,
            ] {
                for shown in item.display_values(slot) {
                    display
                        .entry((slot, canonical_text(shown)))
                        .or_insert_with(|| shown.to_string());
                }
            }
        }
        items.sort_by(rank_order);
        let items: Vec<Indexed> = items.into_iter().map(Indexed::new).collect();
        let by_id = items
            .iter()
            .enumerate()
            .map(|(i, ix)| (ix.item.id.clone(), i))
            .collect();

        let mut lexicons: BTreeMap<SlotName, BTreeSet<String>> = BTreeMap::new();
        for ix in &items {
            for slot in [SlotName::Genres, SlotName::Keywords, SlotName::Actors, SlotName::Directors] {
                lexicons
                    .entry(slot)
                    .or_default()
                    .extend(ix.set(slot).into_iter().flatten().cloned());
            }
            lexicons.entry(SlotName::Title).or_default().insert(ix.title.clone());
        }

        let genres = lexicons.get(&SlotName::Genres).cloned().unwrap_or_default();
        let mut kept_synonyms = BTreeMap::new();
        for (genre, syns) in synonyms.synonyms {
            if genres.contains(&genre) {
                kept_synonyms.insert(genre, syns);
            } else {
                report.unknown_synonym_genres.push(genre);
            }
        }

        Catalog {
            items,
            by_id,
            lexicons,
            synonyms: kept_synonyms,
            display,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.by_id.get(id).map(|&i| &self.items[i].item)
    }

    /// Items in ranking order.
    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().map(|ix| &ix.item)
    }

    /// Ranking position of an item (0 is best).
    pub fn rank(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// Canonical value set of a lexicon-bearing slot.
    pub fn lexicon(&self, slot: SlotName) -> Result<&BTreeSet<String>, CatalogError> {
        if !slot.has_lexicon() {
            return Err(CatalogError::NotLexiconSlot(slot));
        }
        Ok(self.lexicons.get(&slot).expect("all lexicon slots are built"))
    }

    /// Synonym phrases for each canonical genre.
    pub fn genre_synonyms(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.synonyms
    }

    /// Resolves a synonym phrase (or the genre itself) to its genre.
    pub fn resolve_genre(&self, phrase: &str) -> Option<&str> {
        let phrase = canonical_text(phrase);
        if let Some(g) = self.lexicons[&SlotName::Genres].get(&phrase) {
            return Some(g.as_str());
        }
        self.synonyms
            .iter()
            .find(|(_, syns)| syns.contains(&phrase))
            .map(|(g, _)| g.as_str())
    }

    /// Original casing of a canonical value, when the catalog knows it.
    pub fn display(&self, slot: SlotName, canonical: &str) -> Option<&str> {
        self.display.get(&(slot, canonical.to_string())).map(String::as_str)
    }

    /// Ids of every item satisfying the need, in ranking order.
    pub fn filter_items(&self, need: &InformationNeed) -> Vec<ItemId> {
        self.filter_items_with(need, MatchMode::Conjunctive)
    }

    pub fn filter_items_with(&self, need: &InformationNeed, mode: MatchMode) -> Vec<ItemId> {
        self.items
            .iter()
            .filter(|ix| filter::indexed_satisfies(ix, need, mode))
            .map(|ix| ix.item.id.clone())
            .collect()
    }

    pub fn count_items(&self, need: &InformationNeed) -> usize {
        self.count_items_with(need, MatchMode::Conjunctive)
    }

    pub fn count_items_with(&self, need: &InformationNeed, mode: MatchMode) -> usize {
        self.items
            .iter()
            .filter(|ix| filter::indexed_satisfies(ix, need, mode))
            .count()
    }

    /// Items satisfying the need, in ranking order, without cloning ids.
    pub fn matching<'a>(&'a self, need: &'a InformationNeed) -> impl Iterator<Item = &'a Item> + 'a {
        self.items
            .iter()
            .filter(move |ix| filter::indexed_satisfies(ix, need, MatchMode::Conjunctive))
            .map(|ix| &ix.item)
    }
}
