//! Reviewer verdict bookkeeping and clean-set export.
//!
//! Verdicts are kept in an append-only JSONL log. The in-memory index is
//! rebuilt from the log on open; for each `(set_id, qa_index, reviewer_id)`
//! only the latest verdict counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use convqa_core::ConsistentSet;
use serde::{Deserialize, Serialize};

use crate::formats::{FormatError, lines_with_offsets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Keep,
    Remove,
}

/// What a client submits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictSubmission {
    pub set_id: String,
    pub qa_index: usize,
    pub reviewer_id: String,
    pub decision: Decision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// A stored verdict. `timestamp` is in seconds since the Unix epoch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewVerdict {
    pub set_id: String,
    pub qa_index: usize,
    pub reviewer_id: String,
    pub decision: Decision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub timestamp: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanExportPolicy {
    pub reviewers_required: usize,
    pub keep_quorum: usize,
}

impl Default for CleanExportPolicy {
    fn default() -> Self {
        CleanExportPolicy {
            reviewers_required: 3,
            keep_quorum: 2,
        }
    }
}

impl CleanExportPolicy {
    pub fn new(reviewers_required: usize, keep_quorum: usize) -> Result<Self, ReviewError> {
        if keep_quorum == 0 || keep_quorum > reviewers_required {
            return Err(ReviewError::InvalidPolicy {
                reviewers_required,
                keep_quorum,
            });
        }
        Ok(CleanExportPolicy {
            reviewers_required,
            keep_quorum,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReviewError {
    #[error("no work remaining for this reviewer")]
    NoWorkRemaining,
    #[error("set {set_id} has no QA at index {qa_index}")]
    UnknownTarget { set_id: String, qa_index: usize },
    #[error("malformed verdict: {0}")]
    MalformedVerdict(String),
    #[error("batch size must be positive")]
    EmptyBatch,
    #[error("keep quorum {keep_quorum} must lie in 1..={reviewers_required}")]
    InvalidPolicy {
        reviewers_required: usize,
        keep_quorum: usize,
    },
    #[error("dataset lists set {0} more than once")]
    DuplicateSet(String),
    #[error("verdict log {path}: {source}")]
    Log { path: PathBuf, source: FormatError },
    #[error("verdict log line {line} refers to an unknown target: {message}")]
    StaleLog { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    /// QA pairs in the dataset.
    pub total: usize,
    /// QA pairs with at least `reviewers_required` distinct reviewers.
    pub fully_reviewed: usize,
    pub pending: usize,
}

pub type Clock = Box<dyn Fn() -> u64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Box::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    })
}

type VerdictKey = (String, usize, String);

pub struct ReviewStore {
    sets: Vec<ConsistentSet>,
    by_id: BTreeMap<String, usize>,
    verdicts: BTreeMap<VerdictKey, ReviewVerdict>,
    log: Option<File>,
    policy: CleanExportPolicy,
    clock: Clock,
}

impl std::fmt::Debug for ReviewStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReviewStore")
            .field("sets", &self.sets.len())
            .field("verdicts", &self.verdicts.len())
            .field("policy", &self.policy)
            .finish()
    }
}

impl ReviewStore {
    /// Opens a store over `sets`, replaying the log at `log_path` if it
    /// exists and appending to it from then on. Without a path, verdicts
    /// live in memory only.
    pub fn open(
        sets: Vec<ConsistentSet>,
        log_path: Option<&Path>,
        policy: CleanExportPolicy,
        clock: Clock,
    ) -> Result<Self, ReviewError> {
        CleanExportPolicy::new(policy.reviewers_required, policy.keep_quorum)?;
        let mut by_id = BTreeMap::new();
        for (i, s) in sets.iter().enumerate() {
            if by_id.insert(s.set_id().to_string(), i).is_some() {
                return Err(ReviewError::DuplicateSet(s.set_id().to_string()));
            }
        }
        let mut store = ReviewStore {
            sets,
            by_id,
            verdicts: BTreeMap::new(),
            log: None,
            policy,
            clock,
        };
        if let Some(path) = log_path {
            if path.exists() {
                let text = std::fs::read_to_string(path)?;
                store.replay_log(&text).map_err(|e| match e {
                    ReviewError::Log { source, .. } => ReviewError::Log {
                        path: path.to_path_buf(),
                        source,
                    },
                    other => other,
                })?;
            }
            store.log = Some(OpenOptions::new().create(true).append(true).open(path)?);
        }
        Ok(store)
    }

    /// Indexes every verdict of a log document without writing anything.
    pub fn replay_log(&mut self, text: &str) -> Result<(), ReviewError> {
        for (line, start, raw) in lines_with_offsets(text) {
            let v: ReviewVerdict = serde_json::from_str(raw).map_err(|e| ReviewError::Log {
                path: PathBuf::new(),
                source: FormatError::MalformedInput {
                    line,
                    offset: start + e.column().saturating_sub(1),
                    message: e.to_string(),
                },
            })?;
            self.check_target(&v.set_id, v.qa_index)
                .map_err(|e| ReviewError::StaleLog {
                    line,
                    message: e.to_string(),
                })?;
            self.index(v);
        }
        Ok(())
    }

    fn index(&mut self, v: ReviewVerdict) {
        let key = (v.set_id.clone(), v.qa_index, v.reviewer_id.clone());
        self.verdicts.insert(key, v);
    }

    fn check_target(&self, set_id: &str, qa_index: usize) -> Result<&ConsistentSet, ReviewError> {
        self.set(set_id)
            .filter(|s| qa_index < s.len())
            .ok_or_else(|| ReviewError::UnknownTarget {
                set_id: set_id.to_string(),
                qa_index,
            })
    }

    pub fn policy(&self) -> CleanExportPolicy {
        self.policy
    }

    pub fn sets(&self) -> &[ConsistentSet] {
        &self.sets
    }

    pub fn set(&self, set_id: &str) -> Option<&ConsistentSet> {
        self.by_id.get(set_id).map(|&i| &self.sets[i])
    }

    /// Current verdicts in key order.
    pub fn verdicts(&self) -> impl Iterator<Item = &ReviewVerdict> {
        self.verdicts.values()
    }

    /// Validates, timestamps, logs and indexes a verdict.
    pub fn submit(&mut self, s: VerdictSubmission) -> Result<ReviewVerdict, ReviewError> {
        if s.reviewer_id.trim().is_empty() {
            return Err(ReviewError::MalformedVerdict("reviewer_id is empty".into()));
        }
        if s.set_id.trim().is_empty() {
            return Err(ReviewError::MalformedVerdict("set_id is empty".into()));
        }
        self.check_target(&s.set_id, s.qa_index)?;
        let v = ReviewVerdict {
            set_id: s.set_id,
            qa_index: s.qa_index,
            reviewer_id: s.reviewer_id,
            decision: s.decision,
            reason: s.reason,
            timestamp: (self.clock)(),
        };
        if let Some(log) = self.log.as_mut() {
            let mut line = serde_json::to_string(&v).expect("verdict serializes");
            line.push('\n');
            log.write_all(line.as_bytes())?;
            log.flush()?;
            log.sync_data()?;
        }
        self.index(v.clone());
        Ok(v)
    }

    fn reviewers_of(&self, set_id: &str) -> BTreeSet<&str> {
        self.verdicts
            .range((set_id.to_string(), 0, String::new())..)
            .take_while(|((s, _, _), _)| s == set_id)
            .map(|((_, _, r), _)| r.as_str())
            .collect()
    }

    fn own_count(&self, set_id: &str, reviewer: &str) -> usize {
        self.verdicts
            .range((set_id.to_string(), 0, String::new())..)
            .take_while(|((s, _, _), _)| s == set_id)
            .filter(|((_, _, r), _)| r == reviewer)
            .count()
    }

    /// Up to `n` sets the reviewer has not finished, fewest own verdicts
    /// first, ties by set id. A set already seen by `reviewers_required`
    /// other reviewers is not handed to anyone new.
    pub fn assign_batch(&self, reviewer_id: &str, n: usize) -> Result<Vec<&ConsistentSet>, ReviewError> {
        if n == 0 {
            return Err(ReviewError::EmptyBatch);
        }
        if reviewer_id.trim().is_empty() {
            return Err(ReviewError::MalformedVerdict("reviewer_id is empty".into()));
        }
        let mut candidates: Vec<(usize, &str, &ConsistentSet)> = Vec::new();
        for set in &self.sets {
            let own = self.own_count(set.set_id(), reviewer_id);
            if own >= set.len() {
                continue;
            }
            let reviewers = self.reviewers_of(set.set_id());
            if !reviewers.contains(reviewer_id) && reviewers.len() >= self.policy.reviewers_required {
                continue;
            }
            candidates.push((own, set.set_id(), set));
        }
        candidates.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        if candidates.is_empty() {
            return Err(ReviewError::NoWorkRemaining);
        }
        Ok(candidates.into_iter().take(n).map(|c| c.2).collect())
    }

    fn tally(&self, set_id: &str, qa_index: usize) -> (usize, usize) {
        let mut total = 0;
        let mut keeps = 0;
        for ((_, _, _), v) in self
            .verdicts
            .range((set_id.to_string(), qa_index, String::new())..)
            .take_while(|((s, q, _), _)| s == set_id && *q == qa_index)
        {
            total += 1;
            if v.decision == Decision::Keep {
                keeps += 1;
            }
        }
        (total, keeps)
    }

    pub fn progress(&self) -> Progress {
        let mut p = Progress::default();
        for set in &self.sets {
            for i in 0..set.len() {
                p.total += 1;
                if self.tally(set.set_id(), i).0 >= self.policy.reviewers_required {
                    p.fully_reviewed += 1;
                }
            }
        }
        p.pending = p.total - p.fully_reviewed;
        p
    }

    /// QAs with enough reviews and enough Keep votes, in dataset order. Sets
    /// left with fewer than two QAs are dropped.
    pub fn export_clean(&self) -> Vec<ConsistentSet> {
        self.sets
            .iter()
            .filter_map(|set| {
                let keep: BTreeSet<usize> = (0..set.len())
                    .filter(|&i| {
                        let (total, keeps) = self.tally(set.set_id(), i);
                        total >= self.policy.reviewers_required && keeps >= self.policy.keep_quorum
                    })
                    .collect();
                set.retain_indices(&keep)
            })
            .collect()
    }
}
