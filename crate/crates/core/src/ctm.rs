//! The consistency-teacher loop and the reference answerers.
//!
//! A round walks every source QA of every set, asks the answerer each
//! entailed question (question text only), and keeps the answer as a new
//! training example when the checker finds it consistent with the source
//! above its confidence gate and the answerer itself is confident enough.
//! Accepted examples are handed to [`Answerer::learn`] once the round has
//! finished, in `(set_id, rule_id)` order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::checker::{CheckerConfig, ConsistencyChecker, ConsistencyLabel};
use crate::digest::digest_fields;
use crate::entailment::{DEFAULT_K, EntailmentGenerator, rule_firings};
use crate::lexicon::Lexicon;
use crate::metrics::{MetricsReport, MissingPolicy, Prediction, evaluate};
use crate::parse::{Proposition, Vocabulary, parse_question};
use crate::qa_gen::{ConsistentSet, QAPair};
use crate::scene_graph::{Fact, SceneGraph};
use crate::templates::{self, NO, YES};
use crate::text::{normalize_phrase, normalize_question};

/// Answer text used when an answerer has nothing to say.
pub const UNKNOWN: &str = "unknown";

#[derive(Clone, Debug, PartialEq)]
pub struct Answer {
    pub text: String,
    pub confidence: f64,
}

impl Answer {
    pub fn new(text: &str, confidence: f64) -> Self {
        Answer {
            text: normalize_phrase(text),
            confidence: confidence.clamp(0.0, 1.0),
        }
    }

    pub fn unknown() -> Self {
        Answer::new(UNKNOWN, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnswererError {
    #[error("unknown image {0:?}")]
    UnknownImage(String),
    #[error("answerer failed: {0}")]
    Failed(String),
}

/// A question-answering agent under training.
///
/// `answer` must be deterministic for a fixed internal state; `learn` may
/// change that state.
pub trait Answerer {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError>;

    fn learn(&mut self, _question: &str, _answer: &str, _image_id: &str) {}
}

impl<A: Answerer + ?Sized> Answerer for &mut A {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError> {
        (**self).answer(question, image_id)
    }

    fn learn(&mut self, question: &str, answer: &str, image_id: &str) {
        (**self).learn(question, answer, image_id)
    }
}

/// Answers truthfully from the scene graph, closed-world.
#[derive(Clone, Debug)]
pub struct OracleAnswerer {
    lex: Lexicon,
    graphs: BTreeMap<String, (SceneGraph, Vocabulary)>,
}

pub fn make_oracle_answerer<I>(graphs: I, lex: &Lexicon) -> OracleAnswerer
where
    I: IntoIterator<Item = SceneGraph>,
{
    let base = Vocabulary::from_lexicon(lex);
    let graphs = graphs
        .into_iter()
        .map(|g| {
            let vocab = base.clone().with_graph(&g);
            (g.image_id().to_string(), (g, vocab))
        })
        .collect();
    OracleAnswerer {
        lex: lex.clone(),
        graphs,
    }
}

impl OracleAnswerer {
    pub fn graph(&self, image_id: &str) -> Option<&SceneGraph> {
        self.graphs.get(image_id).map(|(g, _)| g)
    }
}

fn yes_no(b: bool) -> Answer {
    Answer::new(if b { YES } else { NO }, 1.0)
}

fn unique<'a>(mut items: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    let first = items.next()?;
    items.next().is_none().then_some(first)
}

/// The graph's answer to `question`.
pub fn answer_from_graph(graph: &SceneGraph, vocab: &Vocabulary, lex: &Lexicon, question: &str) -> Answer {
    let Some(parsed) = parse_question(question, vocab) else {
        return Answer::unknown();
    };
    match parsed.proposition {
        Proposition::Exists { entity } => yes_no(graph.contains_name(&entity)),
        Proposition::Empty { entity } => {
            if !graph.contains_name(&entity) {
                Answer::unknown()
            } else if graph.is_occupied(&entity) {
                yes_no(false)
            } else {
                // Nothing on or in it; explicit attributes cannot contradict
                // that under a closed-world reading.
                yes_no(true)
            }
        }
        Proposition::AttrYesNo { subject, attribute } => {
            yes_no(graph.attributes_of(&subject).contains(attribute.as_str()))
        }
        Proposition::AttrWh { category, subject } => {
            let attrs = graph.attributes_of(&subject);
            match unique(
                attrs
                    .iter()
                    .copied()
                    .filter(|a| lex.hypernym_of(a) == Some(category.as_str())),
            ) {
                Some(a) => Answer::new(a, 1.0),
                None => Answer::unknown(),
            }
        }
        Proposition::RelYesNo {
            subject,
            predicate,
            object,
        } => yes_no(graph.relation_holds(&subject, &predicate, &object)),
        Proposition::RelWh { predicate, object } => match unique(graph.subjects_of(&predicate, &object).into_iter()) {
            Some(s) => Answer::new(s, 1.0),
            None => Answer::unknown(),
        },
    }
}

impl Answerer for OracleAnswerer {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError> {
        let (graph, vocab) = self
            .graphs
            .get(image_id)
            .ok_or_else(|| AnswererError::UnknownImage(image_id.to_string()))?;
        Ok(answer_from_graph(graph, vocab, &self.lex, question))
    }
}

/// Wraps an answerer and flips every yes/no answer.
#[derive(Clone, Debug)]
pub struct InvertingAnswerer<A>(pub A);

impl<A: Answerer> Answerer for InvertingAnswerer<A> {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError> {
        let mut a = self.0.answer(question, image_id)?;
        if a.text == YES {
            a.text = NO.to_string();
        } else if a.text == NO {
            a.text = YES.to_string();
        }
        Ok(a)
    }
}

/// Wraps an answerer and reports a fixed confidence.
#[derive(Clone, Debug)]
pub struct FixedConfidence<A> {
    pub inner: A,
    pub confidence: f64,
}

impl<A: Answerer> Answerer for FixedConfidence<A> {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError> {
        let mut a = self.inner.answer(question, image_id)?;
        a.confidence = self.confidence;
        Ok(a)
    }

    fn learn(&mut self, question: &str, answer: &str, image_id: &str) {
        self.inner.learn(question, answer, image_id)
    }
}

/// Confidence of answers the tabular learner infers rather than recalls.
pub const READER_CONFIDENCE: f64 = 0.8;

/// Exact-match memory over `(image_id, question)`.
///
/// Hits answer at confidence 1.0. With a reader attached, a miss may still be
/// answered at [`READER_CONFIDENCE`] by a single inference step from the
/// memorized pairs of the same image: a remembered "yes" assertion is expanded
/// through the entailment rules, and a remembered wh answer is restated as
/// the matching yes/no assertion. Inferences are not chained; anything beyond
/// one step must be learned first. Everything else is `unknown` at 0.0.
#[derive(Clone, Debug, Default)]
pub struct TabularAnswerer {
    memory: BTreeMap<(String, String), String>,
    reader: Option<(Lexicon, Vocabulary)>,
}

impl TabularAnswerer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_reader(lex: &Lexicon) -> Self {
        TabularAnswerer {
            memory: BTreeMap::new(),
            reader: Some((lex.clone(), Vocabulary::from_lexicon(lex))),
        }
    }

    pub fn memorize(&mut self, image_id: &str, question: &str, answer: &str) {
        self.memory.insert(
            (image_id.to_string(), normalize_question(question)),
            normalize_phrase(answer),
        );
    }

    /// Teaches the reader the words of a training fact: its entity names,
    /// predicate or attribute. Without a reader this does nothing.
    pub fn learn_vocabulary(&mut self, fact: &Fact) {
        if let Some((_, vocab)) = self.reader.as_mut() {
            *vocab = core::mem::take(vocab).with_fact(fact);
        }
    }

    pub fn len(&self) -> usize {
        self.memory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memory.is_empty()
    }

    fn infer(&self, image_id: &str, question: &str) -> Option<String> {
        let (lex, vocab) = self.reader.as_ref()?;
        for ((img, known_q), known_a) in &self.memory {
            if img != image_id {
                continue;
            }
            let Some(parsed) = parse_question(known_q, vocab) else {
                continue;
            };
            let asserted: Option<Fact> = match (&parsed.proposition, known_a.as_str()) {
                (Proposition::AttrYesNo { subject, attribute }, YES) => Fact::attribute(img, subject, attribute).ok(),
                (
                    Proposition::RelYesNo {
                        subject,
                        predicate,
                        object,
                    },
                    YES,
                ) => Fact::relation(img, subject, predicate, object).ok(),
                (Proposition::Exists { entity }, YES) => Fact::existence(img, entity).ok(),
                (Proposition::AttrWh { subject, .. }, value) if value != UNKNOWN => {
                    if templates::attr_yes_no(subject, value) == question {
                        return Some(YES.to_string());
                    }
                    None
                }
                (Proposition::RelWh { predicate, object }, value) if value != UNKNOWN => {
                    if templates::rel_yes_no(value, predicate, object) == question {
                        return Some(YES.to_string());
                    }
                    None
                }
                _ => None,
            };
            if let Some(fact) = asserted
                && let Some((_, _, a)) = rule_firings(&fact, lex).into_iter().find(|(_, q, _)| q == question)
            {
                return Some(a);
            }
        }
        None
    }
}

impl Answerer for TabularAnswerer {
    fn answer(&self, question: &str, image_id: &str) -> Result<Answer, AnswererError> {
        let q = normalize_question(question);
        if let Some(a) = self.memory.get(&(image_id.to_string(), q.clone())) {
            return Ok(Answer::new(a, 1.0));
        }
        Ok(match self.infer(image_id, &q) {
            Some(a) => Answer::new(&a, READER_CONFIDENCE),
            None => Answer::unknown(),
        })
    }

    fn learn(&mut self, question: &str, answer: &str, image_id: &str) {
        self.memorize(image_id, question, answer);
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub set_id: String,
    pub rule_id: String,
    pub checker_conf: f64,
    pub answer_conf: f64,
}

/// An entailed question with the answerer's accepted answer.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AugmentedExample {
    pub image_id: String,
    pub question: String,
    pub answer: String,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CtmConfig {
    pub answer_confidence_threshold: f64,
    pub checker: CheckerConfig,
    pub k: usize,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for CtmConfig {
    fn default() -> Self {
        CtmConfig {
            answer_confidence_threshold: 0.7,
            checker: CheckerConfig::default(),
            k: DEFAULT_K,
            rounds: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CtmConfigError {
    #[error("answer confidence threshold must lie in [0, 1], got {0}")]
    AnswerThreshold(f64),
    #[error("checker confidence threshold must lie in [0, 1], got {0}")]
    CheckerThreshold(f64),
    #[error("rounds must be at least 1")]
    NoRounds,
}

impl CtmConfig {
    pub fn validate(&self) -> Result<(), CtmConfigError> {
        if !(0.0..=1.0).contains(&self.answer_confidence_threshold) {
            return Err(CtmConfigError::AnswerThreshold(self.answer_confidence_threshold));
        }
        if !(0.0..=1.0).contains(&self.checker.confidence_threshold) {
            return Err(CtmConfigError::CheckerThreshold(self.checker.confidence_threshold));
        }
        if self.rounds == 0 {
            return Err(CtmConfigError::NoRounds);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundStats {
    pub sources: usize,
    pub entailed: usize,
    pub emitted: usize,
    pub inconsistent: usize,
    pub unrelated: usize,
    pub abstained: usize,
    pub low_confidence: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutput {
    pub examples: Vec<AugmentedExample>,
    pub stats: RoundStats,
    pub warnings: Vec<String>,
}

/// One pass of the teacher loop over `sets`.
pub fn ctm_round<A, G, C>(
    sets: &[ConsistentSet],
    answerer: &mut A,
    generator: &G,
    checker: &C,
    cfg: &CtmConfig,
) -> RoundOutput
where
    A: Answerer + ?Sized,
    G: EntailmentGenerator + ?Sized,
    C: ConsistencyChecker + ?Sized,
{
    let mut ordered: Vec<&ConsistentSet> = sets.iter().collect();
    ordered.sort_by(|a, b| a.set_id().cmp(b.set_id()));

    let mut stats = RoundStats::default();
    let mut examples = Vec::new();
    let mut warnings = Vec::new();

    for set in ordered {
        let fact = set.fact();
        for source in set.qas() {
            stats.sources += 1;
            for entailed in generator.generate(source, fact, cfg.k) {
                stats.entailed += 1;
                let answer = match answerer.answer(&entailed.question, set.image_id()) {
                    Ok(a) => a,
                    Err(e) => {
                        stats.failures += 1;
                        warnings.push(format!("set {}: {:?}: {e}", set.set_id(), entailed.question));
                        continue;
                    }
                };
                let verdict = checker.gated_classify(&cfg.checker, source, fact, &entailed.question, &answer.text);
                match verdict {
                    None => stats.abstained += 1,
                    Some(v) => match v.label {
                        ConsistencyLabel::Inconsistent => stats.inconsistent += 1,
                        ConsistencyLabel::Unrelated => stats.unrelated += 1,
                        ConsistencyLabel::Consistent if answer.confidence > cfg.answer_confidence_threshold => {
                            stats.emitted += 1;
                            examples.push(AugmentedExample {
                                image_id: set.image_id().to_string(),
                                question: entailed.question.clone(),
                                answer: answer.text.clone(),
                                provenance: Provenance {
                                    set_id: set.set_id().to_string(),
                                    rule_id: entailed.rule_id.clone(),
                                    checker_conf: v.confidence,
                                    answer_conf: answer.confidence,
                                },
                            });
                        }
                        ConsistencyLabel::Consistent => stats.low_confidence += 1,
                    },
                }
            }
        }
    }

    examples.sort_by(|a, b| {
        (&a.provenance.set_id, &a.provenance.rule_id).cmp(&(&b.provenance.set_id, &b.provenance.rule_id))
    });
    for ex in &examples {
        answerer.learn(&ex.question, &ex.answer, &ex.image_id);
    }
    RoundOutput {
        examples,
        stats,
        warnings,
    }
}

/// Gold sets made of the entailed questions of each input set, with their
/// implied answers. Sets with fewer than two distinct entailed questions are
/// skipped.
pub fn entailed_eval_sets<G>(sets: &[ConsistentSet], generator: &G, k: usize) -> Vec<ConsistentSet>
where
    G: EntailmentGenerator + ?Sized,
{
    let mut out = Vec::new();
    for set in sets {
        let fact = set.fact();
        let mut qas: Vec<QAPair> = Vec::new();
        for source in set.qas() {
            for e in generator.generate(source, fact, k) {
                if !qas.iter().any(|q| q.question == e.question) {
                    qas.push(QAPair::new(&e.question, &e.implied_answer, fact.fact_id()));
                }
            }
        }
        let set_id = format!("{:016x}", digest_fields(&["entailed", set.set_id()]));
        if let Ok(eval) = ConsistentSet::with_id(set_id, fact.clone(), qas) {
            out.push(eval);
        }
    }
    out
}

/// Queries the answerer on every gold question.
pub fn predict<A: Answerer + ?Sized>(answerer: &A, gold: &[ConsistentSet]) -> (Vec<Prediction>, Vec<String>) {
    let mut preds = Vec::new();
    let mut warnings = Vec::new();
    for set in gold {
        for (i, qa) in set.qas().iter().enumerate() {
            match answerer.answer(&qa.question, set.image_id()) {
                Ok(a) => preds.push(Prediction {
                    set_id: set.set_id().to_string(),
                    qa_index: i,
                    answer: a.text,
                    confidence: Some(a.confidence),
                }),
                Err(e) => warnings.push(format!("set {} qa {i}: {e}", set.set_id())),
            }
        }
    }
    (preds, warnings)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundReport {
    pub round: usize,
    pub stats: RoundStats,
    /// Metrics on the evaluation sets after the round; absent when there is
    /// nothing to evaluate.
    pub metrics: Option<MetricsReport>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingReport {
    pub seed: u64,
    /// Metrics before the first round.
    pub baseline: Option<MetricsReport>,
    pub rounds: Vec<RoundReport>,
    pub warnings: Vec<String>,
}

/// Everything a multi-round run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRun {
    pub report: TrainingReport,
    pub examples: Vec<Vec<AugmentedExample>>,
}

fn evaluate_answerer<A: Answerer + ?Sized>(
    answerer: &A,
    eval_sets: &[ConsistentSet],
    warnings: &mut Vec<String>,
) -> Option<MetricsReport> {
    if eval_sets.is_empty() {
        return None;
    }
    let (preds, w) = predict(answerer, eval_sets);
    warnings.extend(w);
    match evaluate(eval_sets, &preds, MissingPolicy::CountWrong) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("evaluation failed: {e}"));
            None
        }
    }
}

/// Runs `cfg.rounds` rounds, evaluating on `eval_sets` before the first and
/// after each round.
pub fn run_ctm<A, G, C>(
    sets: &[ConsistentSet],
    answerer: &mut A,
    generator: &G,
    checker: &C,
    cfg: &CtmConfig,
    eval_sets: &[ConsistentSet],
) -> Result<TrainingRun, CtmConfigError>
where
    A: Answerer + ?Sized,
    G: EntailmentGenerator + ?Sized,
    C: ConsistencyChecker + ?Sized,
{
    cfg.validate()?;
    let mut warnings = Vec::new();
    let baseline = evaluate_answerer(answerer, eval_sets, &mut warnings);
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let mut examples = Vec::with_capacity(cfg.rounds);
    for round in 1..=cfg.rounds {
        let out = ctm_round(sets, answerer, generator, checker, cfg);
        warnings.extend(out.warnings.into_iter().map(|w| format!("round {round}: {w}")));
        let metrics = evaluate_answerer(answerer, eval_sets, &mut warnings);
        rounds.push(RoundReport {
            round,
            stats: out.stats,
            metrics,
        });
        examples.push(out.examples);
    }
    Ok(TrainingRun {
        report: TrainingReport {
            seed: cfg.seed,
            baseline,
            rounds,
            warnings,
        },
        examples,
    })
}

/// Seeds a tabular learner with the gold answers of `sets`, choosing per set
/// the wh question when there is one and the first QA otherwise. The reader
/// also learns the vocabulary of every set's fact.
pub fn seed_with_source_questions(learner: &mut TabularAnswerer, sets: &[ConsistentSet]) {
    for set in sets {
        let qa = set.qas().iter().find(|q| !q.is_yes_no()).unwrap_or(&set.qas()[0]);
        learner.memorize(set.image_id(), &qa.question, &qa.answer);
        learner.learn_vocabulary(set.fact());
    }
}
