//! Rule-based consistency checker.
//!
//! The candidate question is parsed into a proposition and judged against the
//! source fact. Confidence is a fixed scale:
//!
//! * `1.0`: exact template parse anchored on an entity of the fact;
//! * `0.6`: fuzzy parse (slot boundary guessed, or a template parse that
//!   shares no entity with the fact, or no template but a fact entity is
//!   mentioned);
//! * `0.5`: nothing parseable and no fact entity mentioned.
//!
//! Learned checkers plugged in through [`ConsistencyChecker`] are expected to
//! calibrate to the same gate semantics.

use alloc::string::String;

use crate::lexicon::Lexicon;
use crate::parse::{Proposition, Vocabulary, parse_question};
use crate::qa_gen::QAPair;
use crate::scene_graph::{CONTAINMENT_PREDICATES, Fact, FactKind};
use crate::templates::{EMPTY_WORD, NO, YES};
use crate::text::{normalize_answer, normalize_question};

pub const CONFIDENCE_EXACT: f64 = 1.0;
pub const CONFIDENCE_FUZZY: f64 = 0.6;
pub const CONFIDENCE_UNPARSED: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConsistencyLabel {
    Consistent,
    Inconsistent,
    Unrelated,
}

impl ConsistencyLabel {
    pub const ALL: [ConsistencyLabel; 3] = [
        ConsistencyLabel::Consistent,
        ConsistencyLabel::Inconsistent,
        ConsistencyLabel::Unrelated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConsistencyLabel::Consistent => "consistent",
            ConsistencyLabel::Inconsistent => "inconsistent",
            ConsistencyLabel::Unrelated => "unrelated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "consistent" => Some(ConsistencyLabel::Consistent),
            "inconsistent" => Some(ConsistencyLabel::Inconsistent),
            "unrelated" => Some(ConsistencyLabel::Unrelated),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub label: ConsistencyLabel,
    pub confidence: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckerConfig {
    pub confidence_threshold: f64,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        CheckerConfig {
            confidence_threshold: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("confidence threshold must lie in [0, 1], got {0}")]
pub struct InvalidThreshold(pub f64);

impl CheckerConfig {
    pub fn new(confidence_threshold: f64) -> Result<Self, InvalidThreshold> {
        if (0.0..=1.0).contains(&confidence_threshold) {
            Ok(CheckerConfig { confidence_threshold })
        } else {
            Err(InvalidThreshold(confidence_threshold))
        }
    }
}

/// Anything that can judge a candidate QA against a source QA and its fact.
pub trait ConsistencyChecker {
    fn classify(&self, source: &QAPair, fact: &Fact, question: &str, answer: &str) -> Verdict;

    /// The verdict if its confidence reaches the threshold, else an abstention.
    fn gated_classify(
        &self,
        cfg: &CheckerConfig,
        source: &QAPair,
        fact: &Fact,
        question: &str,
        answer: &str,
    ) -> Option<Verdict> {
        let v = self.classify(source, fact, question, answer);
        (v.confidence >= cfg.confidence_threshold).then_some(v)
    }
}

/// What a proposition's answer must be under a fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    YesNo(bool),
    Value(String),
}

impl Expected {
    pub fn as_answer(&self) -> &str {
        match self {
            Expected::YesNo(true) => YES,
            Expected::YesNo(false) => NO,
            Expected::Value(v) => v,
        }
    }
}

/// The answer `prop` must have if `fact` holds, when the fact settles it.
pub fn expected_under(prop: &Proposition, fact: &Fact, lex: &Lexicon) -> Option<Expected> {
    let s = fact.subject();
    let p = fact.predicate();
    let o = fact.object();
    match (prop, fact.kind()) {
        (Proposition::Exists { entity }, _) if fact.mentions(entity) => Some(Expected::YesNo(true)),
        (Proposition::Empty { entity }, FactKind::Relation) if entity == o && CONTAINMENT_PREDICATES.contains(&p) => {
            Some(Expected::YesNo(false))
        }
        (Proposition::Empty { entity }, FactKind::Attribute) if entity == s => {
            if p == EMPTY_WORD {
                Some(Expected::YesNo(true))
            } else if lex.are_antonyms(p, EMPTY_WORD) {
                Some(Expected::YesNo(false))
            } else {
                None
            }
        }
        (Proposition::AttrYesNo { subject, attribute }, FactKind::Attribute) if subject == s => {
            if attribute == p {
                Some(Expected::YesNo(true))
            } else if lex.are_antonyms(attribute, p) {
                Some(Expected::YesNo(false))
            } else {
                None
            }
        }
        (Proposition::AttrWh { category, subject }, FactKind::Attribute)
            if subject == s && lex.hypernym_of(p) == Some(category.as_str()) =>
        {
            Some(Expected::Value(String::from(p)))
        }
        (
            Proposition::RelYesNo {
                subject,
                predicate,
                object,
            },
            FactKind::Relation,
        ) if subject == s && object == o => {
            if predicate == p {
                Some(Expected::YesNo(true))
            } else if lex.relation_antonym_of(p) == Some(predicate.as_str())
                || lex.relation_antonym_of(predicate) == Some(p)
            {
                Some(Expected::YesNo(false))
            } else {
                None
            }
        }
        (Proposition::RelWh { predicate, object }, FactKind::Relation) if predicate == p && object == o => {
            Some(Expected::Value(String::from(s)))
        }
        _ => None,
    }
}

/// The reference checker.
#[derive(Clone, Debug)]
pub struct RuleChecker<'a> {
    lex: &'a Lexicon,
    base_vocab: Vocabulary,
}

impl<'a> RuleChecker<'a> {
    pub fn new(lex: &'a Lexicon) -> Self {
        RuleChecker {
            lex,
            base_vocab: Vocabulary::from_lexicon(lex),
        }
    }
}

impl ConsistencyChecker for RuleChecker<'_> {
    fn classify(&self, source: &QAPair, fact: &Fact, question: &str, answer: &str) -> Verdict {
        let question = normalize_question(question);
        let answer = normalize_answer(answer);

        if question == source.question {
            let label = if answer == normalize_answer(&source.answer) {
                ConsistencyLabel::Consistent
            } else {
                ConsistencyLabel::Inconsistent
            };
            return Verdict {
                label,
                confidence: CONFIDENCE_EXACT,
            };
        }

        let vocab = self.base_vocab.clone().with_fact(fact);
        let Some(parsed) = parse_question(&question, &vocab) else {
            let mentions = fact.entities().any(|e| contains_phrase(&question, e));
            return Verdict {
                label: ConsistencyLabel::Unrelated,
                confidence: if mentions {
                    CONFIDENCE_FUZZY
                } else {
                    CONFIDENCE_UNPARSED
                },
            };
        };

        let anchored = parsed.proposition.entities().iter().any(|e| fact.mentions(e));
        let confidence = if parsed.exact && anchored {
            CONFIDENCE_EXACT
        } else {
            CONFIDENCE_FUZZY
        };
        let label = match expected_under(&parsed.proposition, fact, self.lex) {
            Some(expected) if normalize_answer(expected.as_answer()) == answer => ConsistencyLabel::Consistent,
            Some(_) => ConsistencyLabel::Inconsistent,
            None => ConsistencyLabel::Unrelated,
        };
        Verdict { label, confidence }
    }
}

/// Word-boundary phrase containment.
fn contains_phrase(haystack: &str, phrase: &str) -> bool {
    let hay = haystack.trim_end_matches('?');
    hay.match_indices(phrase).any(|(i, _)| {
        let before_ok = i == 0 || hay.as_bytes()[i - 1] == b' ';
        let end = i + phrase.len();
        let after_ok = end == hay.len() || hay.as_bytes()[end] == b' ';
        before_ok && after_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::SEED_LEXICON;

    fn lex() -> Lexicon {
        Lexicon::parse(SEED_LEXICON).unwrap()
    }

    #[test]
    fn court_example_is_consistent() {
        let lex = lex();
        let checker = RuleChecker::new(&lex);
        let fact = Fact::relation("i", "man", "on", "court").unwrap();
        let source = QAPair::new("Who is on court?", "man", fact.fact_id());
        let v = checker.classify(&source, &fact, "is the court empty?", "no");
        assert_eq!(
            v,
            Verdict {
                label: ConsistencyLabel::Consistent,
                confidence: 1.0
            }
        );
        let v = checker.classify(&source, &fact, "is the court empty?", "yes");
        assert_eq!(
            v,
            Verdict {
                label: ConsistencyLabel::Inconsistent,
                confidence: 1.0
            }
        );
    }

    #[test]
    fn flipped_answer_is_inconsistent() {
        let lex = lex();
        let checker = RuleChecker::new(&lex);
        let fact = Fact::attribute("i", "cup", "white").unwrap();
        let source = QAPair::new("is the cup white?", "yes", fact.fact_id());
        let v = checker.classify(&source, &fact, "is the cup white?", "no");
        assert_eq!(
            v,
            Verdict {
                label: ConsistencyLabel::Inconsistent,
                confidence: 1.0
            }
        );
        let v = checker.classify(&source, &fact, "what color is the cup?", "white");
        assert_eq!(v.label, ConsistencyLabel::Consistent);
        let v = checker.classify(&source, &fact, "what color is the cup?", "black");
        assert_eq!(v.label, ConsistencyLabel::Inconsistent);
    }

    #[test]
    fn unrelated_entity_is_low_confidence() {
        let lex = lex();
        let checker = RuleChecker::new(&lex);
        let fact = Fact::attribute("i", "cup", "white").unwrap();
        let source = QAPair::new("is the cup white?", "yes", fact.fact_id());
        let v = checker.classify(&source, &fact, "is the table wooden?", "yes");
        assert_eq!(v.label, ConsistencyLabel::Unrelated);
        assert!(v.confidence <= 0.6);
        let v = checker.classify(&source, &fact, "how many birds fly?", "two");
        assert_eq!(
            v,
            Verdict {
                label: ConsistencyLabel::Unrelated,
                confidence: 0.5
            }
        );
        let v = checker.classify(&source, &fact, "why is the cup here?", "because");
        assert_eq!(
            v,
            Verdict {
                label: ConsistencyLabel::Unrelated,
                confidence: 0.6
            }
        );
    }

    #[test]
    fn gate_respects_threshold() {
        let lex = lex();
        let checker = RuleChecker::new(&lex);
        let fact = Fact::attribute("i", "cup", "white").unwrap();
        let source = QAPair::new("is the cup white?", "yes", fact.fact_id());
        let cfg = CheckerConfig::default();
        assert!(
            checker
                .gated_classify(&cfg, &source, &fact, "is the cup black?", "no")
                .is_some()
        );
        assert!(
            checker
                .gated_classify(&cfg, &source, &fact, "why is the cup here?", "x")
                .is_none()
        );
        let open = CheckerConfig::new(0.0).unwrap();
        assert!(
            checker
                .gated_classify(&open, &source, &fact, "how many?", "2")
                .is_some()
        );
        assert!(CheckerConfig::new(1.5).is_err());
    }

    #[test]
    fn phrase_containment_respects_word_boundaries() {
        assert!(contains_phrase("why is the cup here?", "cup"));
        assert!(!contains_phrase("why is the cupboard here?", "cup"));
        assert!(contains_phrase("tennis court", "tennis court"));
    }
}
