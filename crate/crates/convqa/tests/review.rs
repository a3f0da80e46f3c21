mod common;

use std::sync::Arc;
use std::sync::atomic::{AtomicU64, Ordering};

use convqa::formats::write_sets;
use convqa::pipeline::generate_from_jsonl;
use convqa::review::{CleanExportPolicy, Decision, Progress, ReviewError, ReviewStore, VerdictSubmission};
use convqa_core::lexicon::SEED_LEXICON;
use convqa_core::{ConsistentSet, FilterConfig, Lexicon};

fn sets() -> Vec<ConsistentSet> {
    let lex = Lexicon::parse(SEED_LEXICON).unwrap();
    generate_from_jsonl(
        &common::fixture_text("graphs50.jsonl"),
        &lex,
        &FilterConfig::default(),
        1,
    )
    .unwrap()
    .sets
    .into_iter()
    .take(4)
    .collect()
}

fn store(sets: Vec<ConsistentSet>) -> ReviewStore {
    ReviewStore::open(sets, None, CleanExportPolicy::default(), Box::new(|| 7)).unwrap()
}

fn verdict(set: &ConsistentSet, qa_index: usize, reviewer: &str, decision: Decision) -> VerdictSubmission {
    VerdictSubmission {
        set_id: set.set_id().into(),
        qa_index,
        reviewer_id: reviewer.into(),
        decision,
        reason: None,
    }
}

fn review_whole_set(store: &mut ReviewStore, set: &ConsistentSet, reviewer: &str, decision: Decision) {
    for i in 0..set.len() {
        store.submit(verdict(set, i, reviewer, decision)).unwrap();
    }
}

fn ids(batch: &[&ConsistentSet]) -> Vec<String> {
    batch.iter().map(|s| s.set_id().to_string()).collect()
}

#[test]
fn fresh_store_hands_out_sets_in_id_order() {
    let sets = sets();
    let s = store(sets.clone());
    let mut expected: Vec<String> = sets.iter().map(|s| s.set_id().to_string()).collect();
    expected.sort();
    assert_eq!(ids(&s.assign_batch("ann", 10).unwrap()), expected);
    assert_eq!(ids(&s.assign_batch("ann", 2).unwrap()), expected[..2].to_vec());
}

#[test]
fn finished_sets_are_not_handed_out_again() {
    let sets = sets();
    let mut s = store(sets.clone());
    review_whole_set(&mut s, &sets[0], "ann", Decision::Keep);
    let batch = ids(&s.assign_batch("ann", 10).unwrap());
    assert!(!batch.contains(&sets[0].set_id().to_string()));
    assert_eq!(batch.len(), sets.len() - 1);
    // Another reviewer still gets it.
    assert!(ids(&s.assign_batch("bob", 10).unwrap()).contains(&sets[0].set_id().to_string()));
}

#[test]
fn partly_reviewed_sets_come_after_untouched_ones() {
    let sets = sets();
    let mut s = store(sets.clone());
    let mut sorted = sets.clone();
    sorted.sort_by(|a, b| a.set_id().cmp(b.set_id()));
    s.submit(verdict(&sorted[0], 0, "ann", Decision::Keep)).unwrap();
    let batch = ids(&s.assign_batch("ann", 10).unwrap());
    assert_eq!(batch.last().unwrap(), sorted[0].set_id());
}

#[test]
fn sets_with_enough_reviewers_are_withheld_from_newcomers() {
    let sets = sets();
    let mut s = store(sets.clone());
    for r in ["a", "b", "c"] {
        s.submit(verdict(&sets[1], 0, r, Decision::Keep)).unwrap();
    }
    assert!(!ids(&s.assign_batch("d", 10).unwrap()).contains(&sets[1].set_id().to_string()));
    // An existing reviewer may still finish it.
    assert!(ids(&s.assign_batch("a", 10).unwrap()).contains(&sets[1].set_id().to_string()));
}

#[test]
fn no_work_remaining_once_everything_is_done() {
    let sets = sets();
    let mut s = store(sets.clone());
    for set in &sets {
        review_whole_set(&mut s, set, "ann", Decision::Keep);
    }
    assert!(matches!(s.assign_batch("ann", 5), Err(ReviewError::NoWorkRemaining)));
    assert!(matches!(s.assign_batch("ann", 0), Err(ReviewError::EmptyBatch)));
    assert!(matches!(s.assign_batch(" ", 5), Err(ReviewError::MalformedVerdict(_))));
}

#[test]
fn unknown_targets_are_rejected() {
    let sets = sets();
    let mut s = store(sets.clone());
    let out_of_range = verdict(&sets[0], sets[0].len(), "ann", Decision::Keep);
    assert!(matches!(s.submit(out_of_range), Err(ReviewError::UnknownTarget { .. })));
    let mut missing = verdict(&sets[0], 0, "ann", Decision::Keep);
    missing.set_id = "ffffffffffffffff".into();
    assert!(matches!(s.submit(missing), Err(ReviewError::UnknownTarget { .. })));
    let mut anonymous = verdict(&sets[0], 0, "", Decision::Keep);
    anonymous.reviewer_id = "  ".into();
    assert!(matches!(s.submit(anonymous), Err(ReviewError::MalformedVerdict(_))));
    assert_eq!(s.verdicts().count(), 0);
}

#[test]
fn later_verdicts_supersede_earlier_ones() {
    let sets = sets();
    let mut s = store(sets.clone());
    s.submit(verdict(&sets[0], 0, "ann", Decision::Keep)).unwrap();
    s.submit(verdict(&sets[0], 0, "ann", Decision::Remove)).unwrap();
    let all: Vec<_> = s.verdicts().collect();
    assert_eq!(all.len(), 1);
    assert_eq!(all[0].decision, Decision::Remove);
    assert_eq!(all[0].timestamp, 7);
}

#[test]
fn progress_counts_fully_reviewed_pairs() {
    let sets = sets();
    let total: usize = sets.iter().map(|s| s.len()).sum();
    let mut s = store(sets.clone());
    assert_eq!(
        s.progress(),
        Progress {
            total,
            fully_reviewed: 0,
            pending: total
        }
    );
    for r in ["a", "b", "c"] {
        s.submit(verdict(&sets[0], 1, r, Decision::Remove)).unwrap();
    }
    s.submit(verdict(&sets[0], 0, "a", Decision::Keep)).unwrap();
    assert_eq!(
        s.progress(),
        Progress {
            total,
            fully_reviewed: 1,
            pending: total - 1
        }
    );
}

#[test]
fn export_applies_the_quorum() {
    let sets = sets();
    let policy = CleanExportPolicy::new(2, 1).unwrap();
    let mut s = ReviewStore::open(sets.clone(), None, policy, Box::new(|| 0)).unwrap();
    assert!(s.export_clean().is_empty());
    // With 2 reviewers and a quorum of 1, one keep suffices.
    review_whole_set(&mut s, &sets[0], "a", Decision::Keep);
    review_whole_set(&mut s, &sets[0], "b", Decision::Remove);
    assert_eq!(s.export_clean(), vec![sets[0].clone()]);
    assert!(CleanExportPolicy::new(2, 3).is_err());
    assert!(CleanExportPolicy::new(2, 0).is_err());
}

#[test]
fn duplicate_sets_are_refused() {
    let sets = sets();
    let twice = vec![sets[0].clone(), sets[0].clone()];
    assert!(matches!(
        ReviewStore::open(twice, None, CleanExportPolicy::default(), Box::new(|| 0)),
        Err(ReviewError::DuplicateSet(_))
    ));
}

#[test]
fn log_replay_reproduces_the_same_export() {
    let sets = sets();
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("verdicts.jsonl");
    let tick = Arc::new(AtomicU64::new(100));
    let clock = {
        let tick = tick.clone();
        Box::new(move || tick.fetch_add(1, Ordering::SeqCst))
    };
    let mut first = ReviewStore::open(sets.clone(), Some(&log), CleanExportPolicy::default(), clock).unwrap();
    for (i, r) in ["a", "b", "c", "a"].iter().enumerate() {
        let d = if i % 2 == 0 { Decision::Keep } else { Decision::Remove };
        review_whole_set(&mut first, &sets[0], r, d);
        review_whole_set(&mut first, &sets[1], r, Decision::Keep);
    }
    let export = write_sets(&first.export_clean());
    let verdicts: Vec<_> = first.verdicts().cloned().collect();
    drop(first);

    let log_text = std::fs::read_to_string(&log).unwrap();
    let second = ReviewStore::open(sets.clone(), Some(&log), CleanExportPolicy::default(), Box::new(|| 0)).unwrap();
    assert_eq!(write_sets(&second.export_clean()), export);
    assert_eq!(second.verdicts().cloned().collect::<Vec<_>>(), verdicts);
    drop(second);
    // Opening does not rewrite the log.
    assert_eq!(std::fs::read_to_string(&log).unwrap(), log_text);
}

#[test]
fn corrupt_logs_are_reported_with_their_line() {
    let sets = sets();
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("verdicts.jsonl");
    std::fs::write(&log, "\n{\"set_id\": 3}\n").unwrap();
    let err = ReviewStore::open(sets.clone(), Some(&log), CleanExportPolicy::default(), Box::new(|| 0)).unwrap_err();
    match err {
        ReviewError::Log { path, source } => {
            assert_eq!(path, log);
            assert_eq!(source.line(), 2);
        }
        other => panic!("unexpected {other:?}"),
    }
    let stale = format!(
        "{{\"set_id\":\"{}\",\"qa_index\":99,\"reviewer_id\":\"a\",\"decision\":\"keep\",\"timestamp\":1}}\n",
        sets[0].set_id()
    );
    std::fs::write(&log, stale).unwrap();
    let err = ReviewStore::open(sets, Some(&log), CleanExportPolicy::default(), Box::new(|| 0)).unwrap_err();
    assert!(matches!(err, ReviewError::StaleLog { line: 1, .. }));
}
