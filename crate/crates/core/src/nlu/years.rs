//! Release-year expressions: exact years, decades, centuries, and the
//! before / after / since / between modifiers.

use super::lemma::{lemmatize, Token};
use super::registry::{phrase_ending_at, Phrase, YearConfig};
use super::span::{Annotation, AnnotationSource};
use crate::catalog::{MAX_YEAR, MIN_YEAR};
use crate::model::{Operator, SlotName, Value};

/// A time period `[start, end)` found at tokens `[first, last]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Period {
    start: i64,
    end: i64,
    exact: bool,
    first: usize,
    last: usize,
}

const ORDINAL_WORDS: [(&str, i64); 6] = [
    ("eighteenth", 18),
    ("nineteenth", 19),
    ("twentieth", 20),
    ("twenty-first", 21),
    ("twentyfirst", 21),
    ("twenty-second", 22),
];

fn surface(t: &Token) -> String {
    t.surface.to_lowercase().replace(['\'', '\u{2019}'], "")
}

fn century_ordinal(word: &str) -> Option<i64> {
    if let Some((_, n)) = ORDINAL_WORDS.iter().find(|(w, _)| *w == word) {
        return Some(*n);
    }
    let digits = word.trim_end_matches(|c: char| c.is_alphabetic());
    let suffix = &word[digits.len()..];
    if !matches!(suffix, "st" | "nd" | "rd" | "th") || digits.is_empty() || digits.len() > 2 {
        return None;
    }
    digits.parse().ok()
}

fn period_at(tokens: &[Token], i: usize, cfg: &YearConfig) -> Option<Period> {
    let word = surface(&tokens[i]);
    if let (Some(n), Some(next)) = (century_ordinal(&word), tokens.get(i + 1)) {
        if next.lemma == "century" && n >= 1 {
            return Some(Period {
                start: (n - 1) * 100,
                end: n * 100,
                exact: false,
                first: i,
                last: i + 1,
            });
        }
    }
    let bytes = word.as_bytes();
    if word.ends_with('s') && word[..word.len() - 1].bytes().all(|b| b.is_ascii_digit()) {
        let num = &word[..word.len() - 1];
        let start = match num.len() {
            2 if bytes[1] == b'0' => cfg.bare_decade_century + num.parse::<i64>().ok()?,
            4 if bytes[3] == b'0' => num.parse().ok()?,
            _ => return None,
        };
        return Some(Period {
            start,
            end: start + 10,
            exact: false,
            first: i,
            last: i,
        });
    }
    if word.len() == 4 && word.bytes().all(|b| b.is_ascii_digit()) {
        let year: i64 = word.parse().ok()?;
        if (MIN_YEAR..=MAX_YEAR).contains(&year) {
            return Some(Period {
                start: year,
                end: year + 1,
                exact: true,
                first: i,
                last: i,
            });
        }
    }
    None
}

/// Position right before `i`, skipping one optional "the".
fn cue_end(lemmas: &[&str], i: usize) -> usize {
    if i > 0 && lemmas[i - 1] == "the" {
        i - 1
    } else {
        i
    }
}

fn annotation(tokens: &[Token], first: usize, last: usize, op: Operator, year: i64) -> Annotation {
    Annotation {
        slot: SlotName::ReleaseYear,
        op,
        value: Value::Int(year),
        span: (tokens[first].start, tokens[last].end),
        source: AnnotationSource::YearPattern,
    }
}

fn matches_at(lemmas: &[&str], cues: &[Phrase], end: usize) -> bool {
    phrase_ending_at(lemmas, cues, 0, end)
}

/// Year annotations over already lemmatized tokens.
pub(crate) fn year_annotations(tokens: &[Token], cfg: &YearConfig) -> Vec<Annotation> {
    let lemmas: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let Some(p) = period_at(tokens, i, cfg) else {
            i += 1;
            continue;
        };
        let before = cue_end(&lemmas, p.first);

        // "between X and Y", "from X to Y"
        if matches_at(&lemmas, &cfg.range_start, before) {
            let mut j = p.last + 1;
            let joined = cfg
                .range_join
                .iter()
                .find(|c| lemmas.len() >= j + c.len() && c.iter().zip(&lemmas[j..]).all(|(a, b)| a == b));
            if let Some(join) = joined {
                j += join.len();
                if lemmas.get(j) == Some(&"the") {
                    j += 1;
                }
                if let Some(q) = (j < tokens.len()).then(|| period_at(tokens, j, cfg)).flatten() {
                    if q.end > p.start {
                        out.push(annotation(tokens, p.first, q.last, Operator::Geq, p.start));
                        if q.exact {
                            out.push(annotation(tokens, p.first, q.last, Operator::Leq, q.start));
                        } else {
                            out.push(annotation(tokens, p.first, q.last, Operator::Lt, q.end));
                        }
                        i = q.last + 1;
                        continue;
                    }
                }
            }
        }

        if matches_at(&lemmas, &cfg.before, before) {
            out.push(annotation(tokens, p.first, p.last, Operator::Lt, p.start));
        } else if matches_at(&lemmas, &cfg.after, before) {
            out.push(annotation(tokens, p.first, p.last, Operator::Gt, p.end - 1));
        } else if matches_at(&lemmas, &cfg.since, before) {
            out.push(annotation(tokens, p.first, p.last, Operator::Geq, p.start));
        } else if p.exact {
            out.push(annotation(tokens, p.first, p.last, Operator::Eq, p.start));
        } else {
            out.push(annotation(tokens, p.first, p.last, Operator::Geq, p.start));
            out.push(annotation(tokens, p.first, p.last, Operator::Lt, p.end));
        }
        i = p.last + 1;
    }
    out
}

/// Finds release-year constraints in an utterance.
pub fn parse_year_expression(utterance: &str, cfg: &YearConfig) -> Vec<Annotation> {
    year_annotations(&lemmatize(utterance), cfg)
}
