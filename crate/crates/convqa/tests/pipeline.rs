mod common;

use std::collections::BTreeMap;

use convqa::formats::{read_graphs_strict, write_sets};
use convqa::pipeline::{Confusion, check_pairs, corrupt_all, generate_from_jsonl};
use convqa_core::checker::{CheckerConfig, ConsistencyLabel, RuleChecker};
use convqa_core::lexicon::SEED_LEXICON;
use convqa_core::{FilterConfig, Lexicon};

fn lex() -> Lexicon {
    Lexicon::parse(SEED_LEXICON).unwrap()
}

fn qas(text: &str) -> Vec<Vec<(String, String)>> {
    let l = lex();
    generate_from_jsonl(text, &l, &FilterConfig::default(), 1)
        .unwrap()
        .sets
        .iter()
        .map(|s| s.qas().iter().map(|q| (q.question.clone(), q.answer.clone())).collect())
        .collect()
}

fn owned(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(q, a)| (q.to_string(), a.to_string())).collect()
}

#[test]
fn three_image_fixture_yields_the_hand_derived_sets() {
    // Crumb and bird are below the area floor; existence facts make no sets.
    let got = qas(&common::fixture_text("graphs3.jsonl"));
    let expected = vec![
        owned(&[
            ("is the man on the court?", "yes"),
            ("is the man under the court?", "no"),
            ("what is on the court?", "man"),
        ]),
        owned(&[
            ("is the cup white?", "yes"),
            ("is the cup black?", "no"),
            ("what color is the cup?", "white"),
        ]),
    ];
    assert_eq!(got, expected);
}

#[test]
fn bad_records_go_to_the_error_channel() {
    let out = generate_from_jsonl(
        &common::fixture_text("graphs_bad.jsonl"),
        &lex(),
        &FilterConfig::default(),
        2,
    )
    .unwrap();
    let lines: Vec<usize> = out.errors.iter().map(|e| e.error.line()).collect();
    assert_eq!(lines, vec![2, 3]);
    let images: Vec<&str> = out.sets.iter().map(|s| s.image_id()).collect();
    assert_eq!(images, vec!["kitchen", "street"]);
}

#[test]
fn empty_input_gives_empty_output() {
    let out = generate_from_jsonl("", &lex(), &FilterConfig::default(), 1).unwrap();
    assert!(out.sets.is_empty() && out.errors.is_empty());
    let out = generate_from_jsonl("\n  \n", &lex(), &FilterConfig::default(), 1).unwrap();
    assert!(out.sets.is_empty() && out.errors.is_empty());
}

#[test]
fn worker_count_does_not_change_output() {
    let text = common::fixture_text("graphs50.jsonl");
    let l = lex();
    let one = write_sets(
        &generate_from_jsonl(&text, &l, &FilterConfig::default(), 1)
            .unwrap()
            .sets,
    );
    for jobs in [2, 3, 8] {
        let many = write_sets(
            &generate_from_jsonl(&text, &l, &FilterConfig::default(), jobs)
                .unwrap()
                .sets,
        );
        assert_eq!(many, one, "jobs = {jobs}");
    }
}

#[test]
fn name_frequency_floor_removes_rare_names() {
    let text = common::fixture_text("graphs3.jsonl");
    let l = lex();
    let counts: BTreeMap<String, u64> =
        [("cup".to_string(), 1), ("man".to_string(), 5), ("court".to_string(), 5)].into();
    let filter = FilterConfig {
        name_counts: Some(counts),
        ..FilterConfig::default()
    };
    let sets = generate_from_jsonl(&text, &l, &filter, 1).unwrap().sets;
    let images: Vec<&str> = sets.iter().map(|s| s.image_id()).collect();
    assert_eq!(images, vec!["court"]);
}

#[test]
fn corruption_is_seeded_and_covers_every_known_set() {
    let text = common::fixture_text("graphs50.jsonl");
    let l = lex();
    let graphs: BTreeMap<_, _> = read_graphs_strict(&text)
        .unwrap()
        .into_iter()
        .map(|g| (g.image_id().to_string(), g))
        .collect();
    let sets = generate_from_jsonl(&text, &l, &FilterConfig::default(), 1)
        .unwrap()
        .sets;
    let (a, missing) = corrupt_all(&sets, &graphs, &l, 5);
    let (b, _) = corrupt_all(&sets, &graphs, &l, 5);
    assert!(missing.is_empty());
    assert_eq!(a, b);
    for set in &sets {
        assert!(a.iter().any(|p| p.set_id == set.set_id()));
    }

    let mut partial = graphs.clone();
    let dropped = sets[0].image_id().to_string();
    partial.remove(&dropped);
    let (_, missing) = corrupt_all(&sets, &partial, &l, 5);
    assert!(!missing.is_empty());
    assert!(
        missing
            .iter()
            .all(|id| sets.iter().any(|s| s.set_id() == id && s.image_id() == dropped))
    );
}

#[test]
fn confusion_counts_abstentions_separately() {
    let mut c = Confusion::default();
    c.add(ConsistencyLabel::Consistent, Some(ConsistencyLabel::Consistent));
    c.add(ConsistencyLabel::Inconsistent, Some(ConsistencyLabel::Consistent));
    c.add(ConsistencyLabel::Consistent, None);
    c.add(ConsistencyLabel::Consistent, Some(ConsistencyLabel::Consistent));
    assert_eq!(c.get(ConsistencyLabel::Consistent, None), 1);
    assert_eq!(c.precision(ConsistencyLabel::Consistent), Some(2.0 / 3.0));
    assert_eq!(c.precision(ConsistencyLabel::Unrelated), None);
    assert!(c.to_tsv().contains("abstained"));
}

#[test]
fn check_pairs_keeps_raw_labels_and_gates_the_matrix() {
    let text = common::fixture_text("graphs3.jsonl");
    let l = lex();
    let graphs: BTreeMap<_, _> = read_graphs_strict(&text)
        .unwrap()
        .into_iter()
        .map(|g| (g.image_id().to_string(), g))
        .collect();
    let sets = generate_from_jsonl(&text, &l, &FilterConfig::default(), 1)
        .unwrap()
        .sets;
    let (pairs, _) = corrupt_all(&sets, &graphs, &l, 1);
    let checker = RuleChecker::new(&l);
    let (verdicts, strict) = check_pairs(&pairs, &checker, &CheckerConfig::new(1.0).unwrap()).unwrap();
    let (same, lenient) = check_pairs(&pairs, &checker, &CheckerConfig::new(0.0).unwrap()).unwrap();
    assert_eq!(verdicts, same);
    assert_eq!(verdicts.len(), pairs.len());
    let abstained = |c: &Confusion| {
        [
            ConsistencyLabel::Consistent,
            ConsistencyLabel::Inconsistent,
            ConsistencyLabel::Unrelated,
        ]
        .iter()
        .map(|g| c.get(*g, None))
        .sum::<usize>()
    };
    assert_eq!(abstained(&lenient), 0);
    let below_one = verdicts.iter().filter(|v| v.confidence < 1.0).count();
    assert_eq!(abstained(&strict), below_one);
}
