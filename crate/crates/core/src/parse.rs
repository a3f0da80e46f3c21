//! Recovers the proposition behind a template-shaped question.
//!
//! Splitting multi-word slots ("is the coffee cup light blue?") needs a
//! vocabulary; callers supply one built from the lexicon plus whatever they
//! know about the image (fact fields or scene-graph names).

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lexicon::Lexicon;
use crate::scene_graph::{Fact, FactKind, SceneGraph};
use crate::templates::EMPTY_WORD;
use crate::text::normalize_phrase;

/// The claim a question asks about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proposition {
    Exists {
        entity: String,
    },
    Empty {
        entity: String,
    },
    AttrYesNo {
        subject: String,
        attribute: String,
    },
    AttrWh {
        category: String,
        subject: String,
    },
    RelYesNo {
        subject: String,
        predicate: String,
        object: String,
    },
    RelWh {
        predicate: String,
        object: String,
    },
}

impl Proposition {
    pub fn is_yes_no(&self) -> bool {
        !matches!(self, Proposition::AttrWh { .. } | Proposition::RelWh { .. })
    }

    /// Entity names the proposition refers to.
    pub fn entities(&self) -> Vec<&str> {
        match self {
            Proposition::Exists { entity } | Proposition::Empty { entity } => alloc::vec![entity],
            Proposition::AttrYesNo { subject, .. } | Proposition::AttrWh { subject, .. } => {
                alloc::vec![subject]
            }
            Proposition::RelYesNo { subject, object, .. } => alloc::vec![subject, object],
            Proposition::RelWh { object, .. } => alloc::vec![object],
        }
    }
}

/// A parse result. `exact` is false when a slot boundary had to be guessed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedQuestion {
    pub proposition: Proposition,
    pub exact: bool,
}

/// Known words used to split multi-word slots.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    pub entities: BTreeSet<String>,
    pub attributes: BTreeSet<String>,
    pub predicates: BTreeSet<String>,
    pub categories: BTreeSet<String>,
}

impl Vocabulary {
    pub fn from_lexicon(lex: &Lexicon) -> Self {
        Vocabulary {
            entities: BTreeSet::new(),
            attributes: lex.attribute_vocabulary().into_iter().map(String::from).collect(),
            predicates: lex.predicate_vocabulary().into_iter().map(String::from).collect(),
            categories: lex.categories().clone(),
        }
    }

    pub fn with_fact(mut self, fact: &Fact) -> Self {
        self.entities.insert(fact.subject().to_string());
        match fact.kind() {
            FactKind::Attribute => {
                self.attributes.insert(fact.predicate().to_string());
            }
            FactKind::Relation => {
                self.predicates.insert(fact.predicate().to_string());
                self.entities.insert(fact.object().to_string());
            }
            FactKind::Existence => {}
        }
        self
    }

    pub fn with_graph(mut self, graph: &SceneGraph) -> Self {
        for obj in graph.objects() {
            self.entities.insert(obj.name.clone());
            self.attributes.extend(obj.attributes.iter().cloned());
        }
        for r in graph.relations() {
            self.predicates.insert(r.predicate.clone());
        }
        self
    }
}

/// Parses a question into a proposition, or `None` when no template shape fits.
pub fn parse_question(question: &str, vocab: &Vocabulary) -> Option<ParsedQuestion> {
    let q = normalize_phrase(question);

    if let Some(rest) = q.strip_prefix("is there ") {
        let entity = strip_article(rest);
        return (!entity.is_empty()).then(|| ParsedQuestion {
            proposition: Proposition::Exists {
                entity: entity.to_string(),
            },
            exact: true,
        });
    }

    for lead in ["what is ", "who is "] {
        if let Some(rest) = q.strip_prefix(lead) {
            return parse_rel_wh(rest, vocab);
        }
    }

    if let Some(rest) = q.strip_prefix("what ") {
        let (category, subject) = rest.split_once(" is ")?;
        let subject = strip_definite(subject);
        if category.is_empty() || subject.is_empty() {
            return None;
        }
        return Some(ParsedQuestion {
            exact: vocab.categories.contains(category),
            proposition: Proposition::AttrWh {
                category: category.to_string(),
                subject: subject.to_string(),
            },
        });
    }

    let rest = q.strip_prefix("is ")?;
    let rest = strip_definite(rest);

    if let Some(entity) = rest.strip_suffix(EMPTY_WORD).and_then(|e| e.strip_suffix(' ')) {
        return (!entity.is_empty()).then(|| ParsedQuestion {
            proposition: Proposition::Empty {
                entity: entity.to_string(),
            },
            exact: true,
        });
    }

    if let Some((left, object)) = split_at_the(rest, |left, right| {
        let ends_with_predicate = vocab.predicates.iter().any(|p| {
            left.len() > p.len() && left.ends_with(p.as_str()) && left.as_bytes()[left.len() - p.len() - 1] == b' '
        });
        cut_score(ends_with_predicate, right, vocab)
    }) {
        let (subject, predicate, exact) = split_tail(left, &vocab.predicates, &vocab.entities)?;
        if object.is_empty() {
            return None;
        }
        return Some(ParsedQuestion {
            proposition: Proposition::RelYesNo {
                subject: subject.to_string(),
                predicate: predicate.to_string(),
                object: object.to_string(),
            },
            exact,
        });
    }

    let (subject, attribute, exact) = split_tail(rest, &vocab.attributes, &vocab.entities)?;
    Some(ParsedQuestion {
        proposition: Proposition::AttrYesNo {
            subject: subject.to_string(),
            attribute: attribute.to_string(),
        },
        exact,
    })
}

fn parse_rel_wh(rest: &str, vocab: &Vocabulary) -> Option<ParsedQuestion> {
    let (predicate, object, exact) = if let Some((p, o)) = split_at_the(rest, |left, right| {
        cut_score(vocab.predicates.contains(left), right, vocab)
    }) {
        (p, o, true)
    } else {
        // Articleless form, e.g. "who is on court".
        let known = vocab
            .predicates
            .iter()
            .filter(|p| rest.len() > p.len() + 1 && rest.starts_with(p.as_str()))
            .filter(|p| rest.as_bytes()[p.len()] == b' ')
            .max_by_key(|p| p.len())?;
        (known.as_str(), &rest[known.len() + 1..], true)
    };
    if predicate.is_empty() || object.is_empty() {
        return None;
    }
    Some(ParsedQuestion {
        proposition: Proposition::RelWh {
            predicate: predicate.to_string(),
            object: object.to_string(),
        },
        exact,
    })
}

/// Splits `text` into `(head, tail)` where the tail is a known word, falling
/// back to a known head, and finally to the last token (inexact).
fn split_tail<'a>(
    text: &'a str,
    tails: &BTreeSet<String>,
    heads: &BTreeSet<String>,
) -> Option<(&'a str, &'a str, bool)> {
    let by_tail = tails
        .iter()
        .filter(|t| text.len() > t.len() + 1 && text.ends_with(t.as_str()))
        .filter(|t| text.as_bytes()[text.len() - t.len() - 1] == b' ')
        .max_by_key(|t| t.len());
    if let Some(t) = by_tail {
        let cut = text.len() - t.len();
        return Some((&text[..cut - 1], &text[cut..], true));
    }
    let by_head = heads
        .iter()
        .filter(|h| text.len() > h.len() + 1 && text.starts_with(h.as_str()))
        .filter(|h| text.as_bytes()[h.len()] == b' ')
        .max_by_key(|h| h.len());
    if let Some(h) = by_head {
        return Some((&text[..h.len()], &text[h.len() + 1..], true));
    }
    let (head, tail) = text.rsplit_once(' ')?;
    Some((head, tail, false))
}

/// Splits around the `" the "` that scores highest under `score`, the first
/// one on ties. Predicates such as "in the middle of" contain the article
/// themselves.
fn split_at_the(text: &str, score: impl Fn(&str, &str) -> u8) -> Option<(&str, &str)> {
    const SEP: &str = " the ";
    let mut best: Option<(u8, usize)> = None;
    for (i, _) in text.match_indices(SEP) {
        let s = score(&text[..i], &text[i + SEP.len()..]);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, i));
        }
    }
    let (_, cut) = best?;
    Some((&text[..cut], &text[cut + SEP.len()..]))
}

/// Two points for a known predicate on the left, one for a known entity on
/// the right.
fn cut_score(predicate_ok: bool, object: &str, vocab: &Vocabulary) -> u8 {
    2 * u8::from(predicate_ok) + u8::from(vocab.entities.contains(object))
}

fn strip_definite(text: &str) -> &str {
    text.strip_prefix("the ").unwrap_or(text)
}

fn strip_article(text: &str) -> &str {
    for article in ["a ", "an ", "the "] {
        if let Some(rest) = text.strip_prefix(article) {
            return rest;
        }
    }
    text
}
