//! Batch operations shared by the command line and the tests.

use std::collections::BTreeMap;

use convqa_core::checker::{CheckerConfig, ConsistencyChecker, ConsistencyLabel};
use convqa_core::qa_gen::{DatasetOutput, RecordError, generate_for_graph, sort_sets};
use convqa_core::{ConsistentSet, FilterConfig, Lexicon, SceneGraph, corrupt};
use rayon::prelude::*;

use crate::formats::{FormatError, PairRecord, VerdictRecord, lines_with_offsets, parse_graph_line};

/// Generates sets from a scene-graph JSONL document on `jobs` worker
/// threads. Output does not depend on `jobs`.
pub fn generate_from_jsonl(
    text: &str,
    lex: &Lexicon,
    filter: &FilterConfig,
    jobs: usize,
) -> Result<DatasetOutput<FormatError>, rayon::ThreadPoolBuildError> {
    let lines: Vec<(usize, usize, &str)> = lines_with_offsets(text).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let per_record: Vec<Result<Vec<ConsistentSet>, FormatError>> = pool.install(|| {
        lines
            .par_iter()
            .map(|&(n, start, line)| parse_graph_line(n, start, line).map(|g| generate_for_graph(&g, lex, filter)))
            .collect()
    });
    let mut sets = Vec::new();
    let mut errors = Vec::new();
    for (index, r) in per_record.into_iter().enumerate() {
        match r {
            Ok(s) => sets.extend(s),
            Err(error) => errors.push(RecordError { index, error }),
        }
    }
    Ok(DatasetOutput {
        sets: sort_sets(sets),
        errors,
    })
}

/// Labeled pairs for every set whose graph is known, in set order.
/// Sets without a graph are returned by id.
pub fn corrupt_all(
    sets: &[ConsistentSet],
    graphs: &BTreeMap<String, SceneGraph>,
    lex: &Lexicon,
    seed: u64,
) -> (Vec<PairRecord>, Vec<String>) {
    let mut out = Vec::new();
    let mut missing = Vec::new();
    for set in sets {
        let Some(graph) = graphs.get(set.image_id()) else {
            missing.push(set.set_id().to_string());
            continue;
        };
        for pair in corrupt(set, graph, lex, seed).pairs {
            out.push(PairRecord::new(set, &pair));
        }
    }
    (out, missing)
}

/// Counts of (gold, predicted) labels. Abstentions are their own column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Confusion {
    pub cells: BTreeMap<(ConsistencyLabel, Option<ConsistencyLabel>), usize>,
}

impl Confusion {
    pub fn add(&mut self, gold: ConsistencyLabel, predicted: Option<ConsistencyLabel>) {
        *self.cells.entry((gold, predicted)).or_default() += 1;
    }

    pub fn get(&self, gold: ConsistencyLabel, predicted: Option<ConsistencyLabel>) -> usize {
        self.cells.get(&(gold, predicted)).copied().unwrap_or(0)
    }

    /// Precision of a predicted class over non-abstained verdicts; `None`
    /// when the class was never predicted.
    pub fn precision(&self, class: ConsistencyLabel) -> Option<f64> {
        let predicted: usize = ConsistencyLabel::ALL.iter().map(|g| self.get(*g, Some(class))).sum();
        (predicted > 0).then(|| self.get(class, Some(class)) as f64 / predicted as f64)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("gold\\predicted");
        for p in ConsistencyLabel::ALL {
            out.push('\t');
            out.push_str(p.as_str());
        }
        out.push_str("\tabstained\n");
        for g in ConsistencyLabel::ALL {
            out.push_str(g.as_str());
            for p in ConsistencyLabel::ALL {
                out.push_str(&format!("\t{}", self.get(g, Some(p))));
            }
            out.push_str(&format!("\t{}\n", self.get(g, None)));
        }
        out
    }
}

/// Runs the gated checker over labeled pairs.
///
/// Abstained pairs are written with their ungated label and confidence, so
/// the threshold can be re-applied downstream; the confusion matrix counts
/// them as abstained.
pub fn check_pairs<C: ConsistencyChecker + ?Sized>(
    pairs: &[PairRecord],
    checker: &C,
    cfg: &CheckerConfig,
) -> Result<(Vec<VerdictRecord>, Confusion), String> {
    let mut verdicts = Vec::with_capacity(pairs.len());
    let mut confusion = Confusion::default();
    for p in pairs {
        let (fact, source, candidate, gold) = p.decode()?;
        let v = checker.classify(&source, &fact, &candidate.question, &candidate.answer);
        let gated = (v.confidence >= cfg.confidence_threshold).then_some(v.label);
        confusion.add(gold, gated);
        verdicts.push(VerdictRecord {
            label: v.label.as_str().to_string(),
            confidence: v.confidence,
            gold_label: gold.as_str().to_string(),
        });
    }
    Ok((verdicts, confusion))
}
