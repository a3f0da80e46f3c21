//! Consistent question-answer generation from scene graphs, consistency
//! metrics, and the consistency-teacher augmentation loop.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the review
//! service and the command line live in the `convqa` crate.
#![no_std]

extern crate alloc;

pub mod checker;
pub mod ctm;
pub mod digest;
pub mod entailment;
pub mod lexicon;
pub mod metrics;
pub mod parse;
pub mod qa_gen;
pub mod scene_graph;
pub mod templates;
pub mod text;

pub use checker::{CheckerConfig, ConsistencyChecker, ConsistencyLabel, RuleChecker, Verdict};
pub use ctm::{
    Answer, Answerer, AnswererError, AugmentedExample, CtmConfig, InvertingAnswerer, OracleAnswerer, RoundStats,
    TabularAnswerer, TrainingReport, ctm_round, entailed_eval_sets, make_oracle_answerer, run_ctm,
};
pub use entailment::{EntailedQuestion, EntailmentGenerator, RuleGenerator, generate_entailed};
pub use lexicon::{Lexicon, LexiconError, load_lexicon};
pub use metrics::{MetricsReport, MissingPolicy, Prediction, compare_reports, evaluate};
pub use qa_gen::{
    ConsistentSet, LabeledPair, QAPair, QaKind, SplitRatios, corrupt, generate_dataset, generate_set, split_dataset,
};
pub use scene_graph::{Fact, FactKind, FilterConfig, SceneGraph, extract_facts, filter_salient};
