//! Tokenizer and rule-based lemmatizer.
//!
//! Tokens are maximal runs of alphanumeric characters; an apostrophe or
//! hyphen between two alphanumerics stays inside the token ("don't",
//! "sci-fi"). Offsets are character positions in the original utterance.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    /// Character offset of the first character.
    pub start: usize,
    /// Character offset one past the last character.
    pub end: usize,
}

#[derive(Deserialize)]
struct ExceptionFile {
    exceptions: HashMap<String, String>,
}

fn exceptions() -> &'static HashMap<String, String> {
    static TABLE: OnceLock<HashMap<String, String>> = OnceLock::new();
    TABLE.get_or_init(|| {
        toml::from_str::<ExceptionFile>(include_str!("../../data/lemmas.toml"))
            .expect("bundled lemma exceptions parse")
            .exceptions
    })
}

fn normalize_char(c: char) -> char {
    match c {
        '\u{2019}' | '\u{2018}' | '`' => '\'',
        '\u{2010}' | '\u{2011}' | '\u{2013}' => '-',
        other => other,
    }
}

fn is_joiner(c: char) -> bool {
    matches!(normalize_char(c), '\'' | '-')
}

/// Splits an utterance into lemmatized tokens.
pub fn lemmatize(utterance: &str) -> Vec<Token> {
    let chars: Vec<char> = utterance.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len()
            && (chars[i].is_alphanumeric()
                || (is_joiner(chars[i])
                    && i + 1 < chars.len()
                    && chars[i + 1].is_alphanumeric()
                    && i > start))
        {
            i += 1;
        }
        let surface: String = chars[start..i].iter().collect();
        tokens.push(Token {
            lemma: lemma_of(&surface),
            surface,
            start,
            end: i,
        });
    }
    tokens
}

/// Lemma of a single word.
pub fn lemma_of(word: &str) -> String {
    let w: String = word
        .chars()
        .map(normalize_char)
        .flat_map(char::to_lowercase)
        .collect();
    if let Some(l) = exceptions().get(&w) {
        return l.clone();
    }
    if let Some(base) = w.strip_suffix("'s") {
        if !base.is_empty() {
            return base.to_string();
        }
    }
    if !w.chars().all(|c| c.is_alphabetic() || c == '-' || c == '\'') || w.chars().count() <= 3 {
        return w;
    }
    suffix_rules(&w)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| is_vowel(c) || c == 'y')
}

/// Undoubles a final consonant or restores a silent `e` after stripping
/// `-ing` / `-ed`.
fn repair_stem(stem: &str) -> String {
    let cs: Vec<char> = stem.chars().collect();
    let n = cs.len();
    if n >= 2 && cs[n - 1] == cs[n - 2] && !is_vowel(cs[n - 1]) && !matches!(cs[n - 1], 'l' | 's' | 'z') {
        return cs[..n - 1].iter().collect();
    }
    if n == 3 && !is_vowel(cs[0]) && is_vowel(cs[1]) && !is_vowel(cs[2]) && !matches!(cs[2], 'w' | 'x' | 'y') {
        return format!("{stem}e");
    }
    stem.to_string()
}

fn suffix_rules(w: &str) -> String {
    let len = w.chars().count();
    if let Some(stem) = w.strip_suffix("ies") {
        if len > 4 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = w.strip_suffix("es") {
        if ["ss", "ch", "sh", "x", "z"].iter().any(|s| stem.ends_with(s)) {
            return stem.to_string();
        }
    }
    if w.ends_with('s') && !["ss", "us", "is", "'s"].iter().any(|s| w.ends_with(s)) {
        return w[..w.len() - 1].to_string();
    }
    if let Some(stem) = w.strip_suffix("ing") {
        if stem.chars().count() >= 3 && has_vowel(stem) {
            return repair_stem(stem);
        }
    }
    if let Some(stem) = w.strip_suffix("ied") {
        if len > 4 {
            return format!("{stem}y");
        }
    }
    if !w.ends_with("eed") {
        if let Some(stem) = w.strip_suffix("ed") {
            if stem.chars().count() >= 3 && has_vowel(stem) {
                return repair_stem(stem);
            }
        }
    }
    w.to_string()
}

/// Lemma key of a phrase: token lemmas joined by single spaces.
pub fn lemma_key(phrase: &str) -> String {
    lemmatize(phrase)
        .into_iter()
        .map(|t| t.lemma)
        .collect::<Vec<_>>()
        .join(" ")
}
