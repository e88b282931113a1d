//! Converts a MovieLens-style CSV export into the catalog's JSON-lines
//! format.
//!
//! `movies.csv` (movieId, title, genres) is required. `ratings.csv`
//! (userId, movieId, rating, timestamp) provides rating and votes; the
//! 0.5-5 star mean is doubled onto the 0-10 scale. `tags.csv` supplies
//! keywords and `links.csv` the IMDb page. MovieLens has no cast or crew, so
//! `actors` and `directors` stay empty.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context as _;
use cinebot_core::catalog::{Item, MAX_YEAR, MIN_YEAR};
use serde::{Deserialize, Serialize};

/// Tags kept per movie, most frequent first.
pub const MAX_KEYWORDS: usize = 8;

#[derive(Debug, Clone)]
pub struct MovieLensFiles {
    pub movies: PathBuf,
    pub ratings: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub links: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvertReport {
    pub written: usize,
    pub no_year: usize,
    pub no_genres: usize,
    pub no_rating: usize,
    pub below_min_votes: usize,
}

#[derive(Deserialize)]
struct MovieRow {
    #[serde(rename = "movieId")]
    movie_id: u64,
    title: String,
    genres: String,
}

#[derive(Deserialize)]
struct RatingRow {
    #[serde(rename = "movieId")]
    movie_id: u64,
    rating: f64,
}

#[derive(Deserialize)]
struct TagRow {
    #[serde(rename = "movieId")]
    movie_id: u64,
    tag: String,
}

#[derive(Deserialize)]
struct LinkRow {
    #[serde(rename = "movieId")]
    movie_id: u64,
    #[serde(rename = "imdbId")]
    imdb_id: Option<String>,
}

/// Splits `"Matrix, The (1999)"` into `("The Matrix", Some(1999))`.
pub fn split_title(raw: &str) -> (String, Option<i64>) {
    let raw = raw.trim();
    let (name, year) = match raw.rfind('(') {
        Some(open) if raw.ends_with(')') => {
            let inner = &raw[open + 1..raw.len() - 1];
            match inner.trim().parse::<i64>() {
                Ok(y) => (raw[..open].trim(), Some(y)),
                Err(_) => (raw, None),
            }
        }
        _ => (raw, None),
    };
    for article in ["The", "A", "An"] {
        if let Some(base) = name.strip_suffix(&format!(", {article}")) {
            return (format!("{article} {base}"), year);
        }
    }
    (name.to_string(), year)
}

fn reader(path: &PathBuf) -> anyhow::Result<csv::Reader<std::fs::File>> {
    csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))
}

pub fn convert<W: Write>(files: &MovieLensFiles, min_votes: u64, out: &mut W) -> anyhow::Result<ConvertReport> {
    let mut ratings: HashMap<u64, (f64, u64)> = HashMap::new();
    if let Some(path) = &files.ratings {
        for row in reader(path)?.deserialize::<RatingRow>() {
            let row = row.with_context(|| format!("reading {}", path.display()))?;
            let e = ratings.entry(row.movie_id).or_default();
            e.0 += row.rating;
            e.1 += 1;
        }
    }
    let mut tags: HashMap<u64, BTreeMap<String, u64>> = HashMap::new();
    if let Some(path) = &files.tags {
        for row in reader(path)?.deserialize::<TagRow>() {
            let row = row.with_context(|| format!("reading {}", path.display()))?;
            let tag = row.tag.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            if !tag.is_empty() {
                *tags.entry(row.movie_id).or_default().entry(tag).or_default() += 1;
            }
        }
    }
    let mut links: HashMap<u64, String> = HashMap::new();
    if let Some(path) = &files.links {
        for row in reader(path)?.deserialize::<LinkRow>() {
            let row = row.with_context(|| format!("reading {}", path.display()))?;
            if let Some(imdb) = row.imdb_id.filter(|s| !s.trim().is_empty()) {
                links.insert(row.movie_id, format!("https://www.imdb.com/title/tt{}/", imdb.trim()));
            }
        }
    }

    let mut report = ConvertReport::default();
    for row in reader(&files.movies)?.deserialize::<MovieRow>() {
        let row = row.with_context(|| format!("reading {}", files.movies.display()))?;
        let (title, year) = split_title(&row.title);
        let Some(year) = year.filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y)) else {
            report.no_year += 1;
            continue;
        };
        let genres: Vec<String> = row
            .genres
            .split('|')
            .map(str::trim)
            .filter(|g| !g.is_empty() && *g != "(no genres listed)")
            .map(str::to_string)
            .collect();
        if genres.is_empty() {
            report.no_genres += 1;
            continue;
        }
        let Some(&(sum, votes)) = ratings.get(&row.movie_id) else {
            report.no_rating += 1;
            continue;
        };
        if votes < min_votes {
            report.below_min_votes += 1;
            continue;
        }
        let rating = (sum / votes as f64 * 2.0 * 10.0).round() / 10.0;
        let mut keywords: Vec<(String, u64)> = tags.remove(&row.movie_id).unwrap_or_default().into_iter().collect();
        keywords.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let item = Item {
            id: format!("ml{}", row.movie_id),
            title,
            genres,
            keywords: keywords.into_iter().take(MAX_KEYWORDS).map(|(k, _)| k).collect(),
            actors: Vec::new(),
            directors: Vec::new(),
            release_year: year,
            duration: None,
            rating: rating.clamp(0.0, 10.0),
            votes,
            plot: String::new(),
            item_url: links.remove(&row.movie_id).unwrap_or_default(),
            cover_url: String::new(),
        };
        serde_json::to_writer(&mut *out, &item)?;
        out.write_all(b"\n")?;
        report.written += 1;
    }
    Ok(report)
}
