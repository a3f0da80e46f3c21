//! Perf-Con, Avg-Con and Top-1 over consistent sets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::qa_gen::{ConsistentSet, QaKind};
pub use crate::text::normalize_answer;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prediction {
    pub set_id: String,
    pub qa_index: usize,
    pub answer: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub confidence: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MissingPolicy {
    /// A missing prediction counts as a wrong answer.
    #[default]
    CountWrong,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("duplicate prediction for set {set_id} qa {qa_index}")]
    DuplicatePrediction { set_id: String, qa_index: usize },
    #[error("prediction references unknown set {0}")]
    UnknownSet(String),
    #[error("prediction for set {set_id} has qa_index {qa_index} but the set has {size} QAs")]
    QaIndexOutOfRange {
        set_id: String,
        qa_index: usize,
        size: usize,
    },
    #[error("no prediction for set {set_id} qa {qa_index}")]
    MissingPrediction { set_id: String, qa_index: usize },
    #[error("gold data contains no sets")]
    EmptyGold,
    #[error("gold set id {0} appears more than once")]
    DuplicateGoldSet(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SetScore {
    pub set_id: String,
    pub correct: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub perf_con: f64,
    pub avg_con: f64,
    pub top1: f64,
    pub n_sets: usize,
    pub n_questions: usize,
    /// Top-1 over yes/no questions only, when any exist.
    pub yes_no_top1: Option<f64>,
    /// Top-1 over wh questions only, when any exist.
    pub wh_top1: Option<f64>,
    pub per_set: Vec<SetScore>,
}

/// Scores `preds` against `gold` by normalized exact match.
pub fn evaluate(
    gold: &[ConsistentSet],
    preds: &[Prediction],
    policy: MissingPolicy,
) -> Result<MetricsReport, MetricsError> {
    if gold.is_empty() {
        return Err(MetricsError::EmptyGold);
    }
    let mut by_id: BTreeMap<&str, &ConsistentSet> = BTreeMap::new();
    for set in gold {
        if by_id.insert(set.set_id(), set).is_some() {
            return Err(MetricsError::DuplicateGoldSet(set.set_id().into()));
        }
    }

    let mut answers: BTreeMap<(&str, usize), &str> = BTreeMap::new();
    for p in preds {
        let set = by_id
            .get(p.set_id.as_str())
            .ok_or_else(|| MetricsError::UnknownSet(p.set_id.clone()))?;
        if p.qa_index >= set.len() {
            return Err(MetricsError::QaIndexOutOfRange {
                set_id: p.set_id.clone(),
                qa_index: p.qa_index,
                size: set.len(),
            });
        }
        if answers.insert((set.set_id(), p.qa_index), &p.answer).is_some() {
            return Err(MetricsError::DuplicatePrediction {
                set_id: p.set_id.clone(),
                qa_index: p.qa_index,
            });
        }
    }

    let mut per_set = Vec::with_capacity(gold.len());
    let mut perfect = 0usize;
    let mut ratio_sum = 0.0f64;
    let mut total_correct = 0usize;
    let mut total = 0usize;
    let mut kind_tally: BTreeMap<QaKind, (usize, usize)> = BTreeMap::new();

    for set in gold {
        let mut correct = 0usize;
        for (i, qa) in set.qas().iter().enumerate() {
            let hit = match answers.get(&(set.set_id(), i)) {
                Some(answer) => normalize_answer(answer) == normalize_answer(&qa.answer),
                None if policy == MissingPolicy::Error => {
                    return Err(MetricsError::MissingPrediction {
                        set_id: set.set_id().into(),
                        qa_index: i,
                    });
                }
                None => false,
            };
            let tally = kind_tally.entry(qa.kind).or_default();
            tally.1 += 1;
            if hit {
                correct += 1;
                tally.0 += 1;
            }
        }
        if correct == set.len() {
            perfect += 1;
        }
        ratio_sum += correct as f64 / set.len() as f64;
        total_correct += correct;
        total += set.len();
        per_set.push(SetScore {
            set_id: set.set_id().into(),
            correct,
            size: set.len(),
        });
    }

    let n_sets = gold.len();
    let slice = |kind| kind_tally.get(&kind).map(|(c, n)| 100.0 * *c as f64 / *n as f64);
    Ok(MetricsReport {
        perf_con: 100.0 * perfect as f64 / n_sets as f64,
        avg_con: 100.0 * ratio_sum / n_sets as f64,
        top1: 100.0 * total_correct as f64 / total as f64,
        n_sets,
        n_questions: total,
        yes_no_top1: slice(QaKind::YesNo),
        wh_top1: slice(QaKind::Wh),
        per_set,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricDelta {
    pub metric: &'static str,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

/// Side-by-side comparison of two reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub rows: Vec<MetricDelta>,
    pub warnings: Vec<String>,
}

pub fn compare_reports(a: &MetricsReport, b: &MetricsReport) -> Comparison {
    let row = |metric, x: f64, y: f64| MetricDelta {
        metric,
        a: x,
        b: y,
        delta: y - x,
    };
    let rows = alloc::vec![
        row("perf_con", a.perf_con, b.perf_con),
        row("avg_con", a.avg_con, b.avg_con),
        row("top1", a.top1, b.top1),
    ];
    let mut warnings = Vec::new();
    if a.n_sets != b.n_sets {
        warnings.push(format!(
            "reports cover different numbers of sets ({} vs {})",
            a.n_sets, b.n_sets
        ));
    }
    if a.n_questions != b.n_questions {
        warnings.push(format!(
            "reports cover different numbers of questions ({} vs {})",
            a.n_questions, b.n_questions
        ));
    }
    Comparison { rows, warnings }
}

impl Comparison {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\ta\tb\tdelta\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{:.2}\t{:.2}\t{:+.2}", r.metric, r.a, r.b, r.delta);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<10} {:>8} {:>8} {:>8}\n", "metric", "a", "b", "delta");
        for r in &self.rows {
            let _ = writeln!(out, "{:<10} {:>8.2} {:>8.2} {:>+8.2}", r.metric, r.a, r.b, r.delta);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
