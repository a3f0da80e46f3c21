//! Antonym and hypernym tables plus the surface-form helpers used by the
//! question templates.
//!
//! File layout:
//!
//! ```text
//! #categories: color,size,state
//! white: black,gray | color
//! big: small | size
//! #relations
//! on: under
//! #noarticle
//! grass
//! ```
//!
//! Attribute entries are `key: antonym1,antonym2 | category`; either side of
//! the `|` may be empty. Lines starting with `# ` (hash, space) and blank
//! lines are ignored. `#attributes` switches back to the attribute section.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::normalize_phrase;

/// Seed lexicon shipped with the crate.
pub const SEED_LEXICON: &str = include_str!("../data/seed_lexicon.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    MalformedInput { line: usize, message: String },
    #[error("line {line}: {phrase:?} is listed as its own antonym")]
    SelfAntonym { line: usize, phrase: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: category {category:?} is not declared in the header")]
    UnknownCategory { line: usize, category: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Attributes,
    Relations,
    NoArticle,
}

/// Immutable lexicon tables. All keys are in phrase normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    categories: BTreeSet<String>,
    antonyms: BTreeMap<String, Vec<String>>,
    hypernyms: BTreeMap<String, String>,
    relation_antonyms: BTreeMap<String, String>,
    no_article: BTreeSet<String>,
}

/// Article choice for a noun phrase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceForms {
    pub article: &'static str,
    pub np_with_article: String,
}

/// A lexicon hygiene problem that does not prevent loading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LintIssue {
    AsymmetricAntonym { phrase: String, antonym: String },
    AsymmetricRelation { predicate: String, opposite: String },
    AntonymCategoryMismatch { phrase: String, antonym: String },
}

impl core::fmt::Display for LintIssue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LintIssue::AsymmetricAntonym { phrase, antonym } => {
                write!(f, "antonym {phrase:?} -> {antonym:?} has no reverse entry")
            }
            LintIssue::AsymmetricRelation { predicate, opposite } => {
                write!(f, "relation {predicate:?} -> {opposite:?} has no reverse entry")
            }
            LintIssue::AntonymCategoryMismatch { phrase, antonym } => {
                write!(f, "antonyms {phrase:?} and {antonym:?} have different categories")
            }
        }
    }
}

/// Parses a lexicon from raw bytes.
pub fn load_lexicon(raw: &[u8]) -> Result<Lexicon, LexiconError> {
    let text = core::str::from_utf8(raw).map_err(|e| LexiconError::MalformedInput {
        line: 0,
        message: format!("invalid utf-8 at byte {}", e.valid_up_to()),
    })?;
    Lexicon::parse(text)
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        let mut header_seen = false;
        let mut section = Section::Attributes;

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with("# ") || line == "#" {
                continue;
            }
            if !header_seen {
                let Some(list) = line.strip_prefix("#categories:") else {
                    return Err(malformed(line_no, "expected `#categories:` header"));
                };
                for cat in list.split(',') {
                    let cat = normalize_phrase(cat);
                    if !cat.is_empty() {
                        lex.categories.insert(cat);
                    }
                }
                header_seen = true;
                continue;
            }
            if let Some(directive) = line.strip_prefix('#') {
                section = match directive.trim() {
                    "attributes" => Section::Attributes,
                    "relations" => Section::Relations,
                    "noarticle" => Section::NoArticle,
                    other => {
                        return Err(malformed(line_no, &format!("unknown directive `#{other}`")));
                    }
                };
                continue;
            }
            match section {
                Section::Attributes => lex.parse_attribute_line(line_no, line)?,
                Section::Relations => lex.parse_relation_line(line_no, line)?,
                Section::NoArticle => {
                    let noun = normalize_phrase(line);
                    if !lex.no_article.insert(noun.clone()) {
                        return Err(LexiconError::DuplicateKey {
                            line: line_no,
                            key: noun,
                        });
                    }
                }
            }
        }
        if !header_seen {
            return Err(malformed(0, "missing `#categories:` header"));
        }
        Ok(lex)
    }

    fn parse_attribute_line(&mut self, line_no: usize, line: &str) -> Result<(), LexiconError> {
        let (key, rest) = split_entry(line_no, line)?;
        if self.antonyms.contains_key(&key) || self.hypernyms.contains_key(&key) {
            return Err(LexiconError::DuplicateKey { line: line_no, key });
        }
        let (antonym_part, category_part) = match rest.split_once('|') {
            Some((a, c)) => (a, Some(c)),
            None => (rest, None),
        };
        let mut antonyms = Vec::new();
        for a in antonym_part.split(',') {
            let a = normalize_phrase(a);
            if a.is_empty() || antonyms.contains(&a) {
                continue;
            }
            if a == key {
                return Err(LexiconError::SelfAntonym {
                    line: line_no,
                    phrase: key,
                });
            }
            antonyms.push(a);
        }
        if let Some(cat) = category_part {
            let cat = normalize_phrase(cat);
            if !cat.is_empty() {
                if !self.categories.contains(&cat) {
                    return Err(LexiconError::UnknownCategory {
                        line: line_no,
                        category: cat,
                    });
                }
                self.hypernyms.insert(key.clone(), cat);
            }
        }
        if !antonyms.is_empty() {
            self.antonyms.insert(key, antonyms);
        } else if !self.hypernyms.contains_key(&key) {
            return Err(malformed(line_no, "entry has neither antonyms nor a category"));
        }
        Ok(())
    }

    fn parse_relation_line(&mut self, line_no: usize, line: &str) -> Result<(), LexiconError> {
        let (key, rest) = split_entry(line_no, line)?;
        let opposite = normalize_phrase(rest);
        if opposite.is_empty() || opposite.contains(',') || opposite.contains('|') {
            return Err(malformed(line_no, "relation entries take exactly one opposite"));
        }
        if opposite == key {
            return Err(LexiconError::SelfAntonym {
                line: line_no,
                phrase: key,
            });
        }
        if self.relation_antonyms.contains_key(&key) {
            return Err(LexiconError::DuplicateKey { line: line_no, key });
        }
        self.relation_antonyms.insert(key, opposite);
        Ok(())
    }

    pub fn categories(&self) -> &BTreeSet<String> {
        &self.categories
    }

    pub fn is_category(&self, word: &str) -> bool {
        self.categories.contains(word)
    }

    /// First listed antonym of `phrase`.
    pub fn antonym_of(&self, phrase: &str) -> Option<&str> {
        self.antonyms_of(phrase).first().map(String::as_str)
    }

    pub fn antonyms_of(&self, phrase: &str) -> &[String] {
        self.antonyms.get(phrase).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when either phrase lists the other as an antonym.
    pub fn are_antonyms(&self, a: &str, b: &str) -> bool {
        self.antonyms_of(a).iter().any(|x| x == b) || self.antonyms_of(b).iter().any(|x| x == a)
    }

    pub fn hypernym_of(&self, phrase: &str) -> Option<&str> {
        self.hypernyms.get(phrase).map(String::as_str)
    }

    pub fn relation_antonym_of(&self, predicate: &str) -> Option<&str> {
        self.relation_antonyms.get(predicate).map(String::as_str)
    }

    pub fn is_no_article(&self, noun: &str) -> bool {
        self.no_article.contains(noun)
    }

    /// Every attribute phrase the lexicon mentions, as key or antonym.
    pub fn attribute_vocabulary(&self) -> BTreeSet<&str> {
        self.antonyms
            .iter()
            .flat_map(|(k, v)| core::iter::once(k).chain(v.iter()))
            .chain(self.hypernyms.keys())
            .map(String::as_str)
            .collect()
    }

    /// Every relation predicate the lexicon mentions, as key or opposite.
    pub fn predicate_vocabulary(&self) -> BTreeSet<&str> {
        self.relation_antonyms
            .iter()
            .flat_map(|(k, v)| [k.as_str(), v.as_str()])
            .collect()
    }

    /// Article and article-prefixed form of a noun phrase.
    pub fn surface_forms(&self, noun: &str) -> SurfaceForms {
        let article = if self.is_no_article(noun) {
            ""
        } else if noun
            .chars()
            .next()
            .is_some_and(|c| matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u'))
        {
            "an"
        } else {
            "a"
        };
        let np_with_article = if article.is_empty() {
            String::from(noun)
        } else {
            format!("{article} {noun}")
        };
        SurfaceForms {
            article,
            np_with_article,
        }
    }

    /// Reports asymmetric antonym pairs and antonyms filed under different
    /// categories.
    pub fn lint(&self) -> Vec<LintIssue> {
        let mut issues = Vec::new();
        for (phrase, list) in &self.antonyms {
            for antonym in list {
                if !self.antonyms_of(antonym).contains(phrase) {
                    issues.push(LintIssue::AsymmetricAntonym {
                        phrase: phrase.clone(),
                        antonym: antonym.clone(),
                    });
                }
                if let (Some(a), Some(b)) = (self.hypernym_of(phrase), self.hypernym_of(antonym))
                    && a != b
                    && phrase < antonym
                {
                    issues.push(LintIssue::AntonymCategoryMismatch {
                        phrase: phrase.clone(),
                        antonym: antonym.clone(),
                    });
                }
            }
        }
        for (predicate, opposite) in &self.relation_antonyms {
            if self.relation_antonym_of(opposite) != Some(predicate.as_str()) {
                issues.push(LintIssue::AsymmetricRelation {
                    predicate: predicate.clone(),
                    opposite: opposite.clone(),
                });
            }
        }
        issues
    }
}

fn split_entry(line_no: usize, line: &str) -> Result<(String, &str), LexiconError> {
    let Some((key, rest)) = line.split_once(':') else {
        return Err(malformed(line_no, "expected `key: value`"));
    };
    let key = normalize_phrase(key);
    if key.is_empty() {
        return Err(malformed(line_no, "empty key"));
    }
    Ok((key, rest))
}

fn malformed(line: usize, message: &str) -> LexiconError {
    LexiconError::MalformedInput {
        line,
        message: String::from(message),
    }
}
