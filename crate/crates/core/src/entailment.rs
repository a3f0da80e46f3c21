//! Entailed-question generation.
//!
//! Rule table (applied in `rule_id` order, source question excluded):
//!
//! | rule_id            | applies to                    | question                    | answer |
//! |--------------------|-------------------------------|-----------------------------|--------|
//! | `r1-attr-affirm`   | attribute                     | is the {s} {attr}?          | yes    |
//! | `r2-attr-antonym`  | attribute with antonym        | is the {s} {antonym}?       | no     |
//! | `r3-attr-wh`       | attribute with hypernym       | what {hypernym} is the {s}? | {attr} |
//! | `r4-rel-empty`     | relation, predicate on / in   | is the {o} empty?           | no     |
//! | `r5-rel-affirm`    | relation                      | is the {s} {p} the {o}?     | yes    |
//! | `r6-rel-antonym`   | relation with opposite        | is the {s} {opp} the {o}?   | no     |
//! | `r7-rel-wh`        | relation                      | what is {p} the {o}?        | {s}    |
//! | `r8-exists-subject`| any fact                      | is there {a/an} {s}?        | yes    |
//! | `r9-exists-object` | relation                      | is there {a/an} {o}?        | yes    |

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lexicon::Lexicon;
use crate::qa_gen::QAPair;
use crate::scene_graph::{CONTAINMENT_PREDICATES, Fact, FactId, FactKind};
use crate::templates::{self, NO, YES};
use crate::text::normalize_question;

/// Default number of entailed questions per source QA.
pub const DEFAULT_K: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailedQuestion {
    pub question: String,
    /// Answer determined by the source fact. Used for testing and oracle
    /// construction only; never shown to an answerer.
    pub implied_answer: String,
    pub source_fact_id: FactId,
    pub rule_id: String,
}

/// Source QA plus fact context to entailed questions.
pub trait EntailmentGenerator {
    fn generate(&self, source: &QAPair, fact: &Fact, k: usize) -> Vec<EntailedQuestion>;
}

#[derive(Clone, Copy, Debug)]
pub struct RuleGenerator<'a> {
    lex: &'a Lexicon,
}

impl<'a> RuleGenerator<'a> {
    pub fn new(lex: &'a Lexicon) -> Self {
        RuleGenerator { lex }
    }
}

impl EntailmentGenerator for RuleGenerator<'_> {
    fn generate(&self, source: &QAPair, fact: &Fact, k: usize) -> Vec<EntailedQuestion> {
        generate_entailed(source, fact, self.lex, k)
    }
}

/// All rule firings for `fact`, in rule order.
pub fn rule_firings(fact: &Fact, lex: &Lexicon) -> Vec<(&'static str, String, String)> {
    let s = fact.subject();
    let p = fact.predicate();
    let o = fact.object();
    let mut out: Vec<(&'static str, String, String)> = Vec::new();
    match fact.kind() {
        FactKind::Attribute => {
            out.push(("r1-attr-affirm", templates::attr_yes_no(s, p), YES.into()));
            if let Some(antonym) = lex.antonym_of(p) {
                out.push(("r2-attr-antonym", templates::attr_yes_no(s, antonym), NO.into()));
            }
            if let Some(category) = lex.hypernym_of(p) {
                out.push(("r3-attr-wh", templates::attr_wh(category, s), p.to_string()));
            }
        }
        FactKind::Relation => {
            if CONTAINMENT_PREDICATES.contains(&p) {
                out.push(("r4-rel-empty", templates::empty(o), NO.into()));
            }
            out.push(("r5-rel-affirm", templates::rel_yes_no(s, p, o), YES.into()));
            if let Some(opposite) = lex.relation_antonym_of(p) {
                out.push(("r6-rel-antonym", templates::rel_yes_no(s, opposite, o), NO.into()));
            }
            out.push(("r7-rel-wh", templates::rel_wh(p, o), s.to_string()));
        }
        FactKind::Existence => {}
    }
    out.push(("r8-exists-subject", templates::exists(lex, s), YES.into()));
    if fact.kind() == FactKind::Relation {
        out.push(("r9-exists-object", templates::exists(lex, o), YES.into()));
    }
    out
}

/// Up to `k` entailed questions for `source`, never repeating its question.
pub fn generate_entailed(source: &QAPair, fact: &Fact, lex: &Lexicon, k: usize) -> Vec<EntailedQuestion> {
    let source_q = normalize_question(&source.question);
    let mut out: Vec<EntailedQuestion> = Vec::new();
    for (rule_id, question, answer) in rule_firings(fact, lex) {
        if out.len() == k {
            break;
        }
        if question == source_q || out.iter().any(|e| e.question == question) {
            continue;
        }
        out.push(EntailedQuestion {
            question,
            implied_answer: answer,
            source_fact_id: fact.fact_id(),
            rule_id: rule_id.to_string(),
        });
    }
    out
}
