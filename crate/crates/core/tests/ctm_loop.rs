use std::cell::RefCell;

use convqa_core::ctm::{Answer, Answerer, AnswererError, CtmConfig, ctm_round};
use convqa_core::entailment::{RuleGenerator, generate_entailed};
use convqa_core::lexicon::SEED_LEXICON;
use convqa_core::{ConsistentSet, Fact, Lexicon, RuleChecker, generate_set};

fn lex() -> Lexicon {
    Lexicon::parse(SEED_LEXICON).unwrap()
}

fn sets(l: &Lexicon) -> Vec<ConsistentSet> {
    vec![
        generate_set(&Fact::attribute("a", "car", "red").unwrap(), l).unwrap(),
        generate_set(&Fact::relation("b", "cat", "on", "bed").unwrap(), l).unwrap(),
    ]
}

/// Answers every question from a fixed table and records what it saw.
#[derive(Default)]
struct Recorder {
    table: Vec<(String, String)>,
    asked: RefCell<Vec<(String, String)>>,
    learned: Vec<(String, String, String)>,
    fail_on: Option<String>,
}

impl Answerer for Recorder {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError> {
        self.asked.borrow_mut().push((image_id.into(), question.into()));
        if self.fail_on.as_deref() == Some(question) {
            return Err(AnswererError::Failed("scripted".into()));
        }
        let text = self
            .table
            .iter()
            .find(|(q, _)| q == question)
            .map(|(_, a)| a.as_str())
            .unwrap_or("unknown");
        Ok(Answer::new(text, 0.95))
    }

    fn learn(&mut self, question: &str, answer: &str, image_id: &str) {
        assert!(
            self.asked.borrow().iter().any(|(i, q)| i == image_id && q == question),
            "learned a question it was never asked"
        );
        self.learned.push((image_id.into(), question.into(), answer.into()));
    }
}

fn truthful(l: &Lexicon, sets: &[ConsistentSet]) -> Vec<(String, String)> {
    sets.iter()
        .flat_map(|s| {
            s.qas()
                .iter()
                .flat_map(|src| generate_entailed(src, s.fact(), l, 10))
                .map(|e| (e.question, e.implied_answer))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn truthful_answers_are_emitted_and_learned_in_order() {
    let l = lex();
    let s = sets(&l);
    let mut agent = Recorder {
        table: truthful(&l, &s),
        ..Recorder::default()
    };
    let out = ctm_round(
        &s,
        &mut agent,
        &RuleGenerator::new(&l),
        &RuleChecker::new(&l),
        &CtmConfig::default(),
    );
    assert_eq!(out.stats.emitted, out.stats.entailed);
    assert_eq!(out.stats.sources, s.iter().map(|x| x.len()).sum::<usize>());
    assert_eq!(agent.learned.len(), out.examples.len());
    let keys: Vec<_> = out
        .examples
        .iter()
        .map(|e| (e.provenance.set_id.clone(), e.provenance.rule_id.clone()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for (ex, learned) in out.examples.iter().zip(&agent.learned) {
        assert_eq!(
            (&ex.image_id, &ex.question, &ex.answer),
            (&learned.0, &learned.1, &learned.2)
        );
    }
}

#[test]
fn unknown_answers_are_not_emitted() {
    let l = lex();
    let s = sets(&l);
    let mut agent = Recorder::default();
    let out = ctm_round(
        &s,
        &mut agent,
        &RuleGenerator::new(&l),
        &RuleChecker::new(&l),
        &CtmConfig::default(),
    );
    assert_eq!(out.stats.emitted, 0);
    assert!(agent.learned.is_empty());
    assert_eq!(agent.asked.borrow().len(), out.stats.entailed);
}

#[test]
fn answerer_failures_are_counted_and_reported() {
    let l = lex();
    let s = sets(&l);
    let mut agent = Recorder {
        table: truthful(&l, &s),
        fail_on: Some("is the car green?".into()),
        ..Recorder::default()
    };
    let out = ctm_round(
        &s,
        &mut agent,
        &RuleGenerator::new(&l),
        &RuleChecker::new(&l),
        &CtmConfig::default(),
    );
    assert!(out.stats.failures > 0);
    assert_eq!(out.warnings.len(), out.stats.failures);
    assert_eq!(out.stats.emitted + out.stats.failures, out.stats.entailed);
}

#[test]
fn wrong_yes_no_answers_are_inconsistent() {
    let l = lex();
    let s = sets(&l);
    let flipped = truthful(&l, &s)
        .into_iter()
        .map(|(q, a)| {
            let a = match a.as_str() {
                "yes" => "no".to_string(),
                "no" => "yes".to_string(),
                _ => a,
            };
            (q, a)
        })
        .collect();
    let mut agent = Recorder {
        table: flipped,
        ..Recorder::default()
    };
    let out = ctm_round(
        &s,
        &mut agent,
        &RuleGenerator::new(&l),
        &RuleChecker::new(&l),
        &CtmConfig::default(),
    );
    assert!(out.examples.iter().all(|e| e.answer != "yes" && e.answer != "no"));
    assert!(out.stats.inconsistent > 0);
}

#[test]
fn invalid_configurations_are_rejected() {
    let bad = CtmConfig {
        answer_confidence_threshold: 1.5,
        ..CtmConfig::default()
    };
    assert!(bad.validate().is_err());
    let none = CtmConfig {
        rounds: 0,
        ..CtmConfig::default()
    };
    assert!(none.validate().is_err());
    assert!(CtmConfig::default().validate().is_ok());
}
