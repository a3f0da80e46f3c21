//! Consistent QA set generation, labeled-pair synthesis and dataset splits.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::{Rng, SeedableRng};

use crate::checker::ConsistencyLabel;
use crate::digest::digest_fields;
use crate::lexicon::Lexicon;
use crate::scene_graph::{CONTAINMENT_PREDICATES, Fact, FactId, FactKind, FilterConfig, SceneGraph, extract_facts};
use crate::templates::{self, EMPTY_WORD, NO, Slot, YES};
use crate::text::{normalize_phrase, normalize_question};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QaKind {
    YesNo,
    Wh,
}

impl QaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QaKind::YesNo => "yesno",
            QaKind::Wh => "wh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "yesno" => Some(QaKind::YesNo),
            "wh" => Some(QaKind::Wh),
            _ => None,
        }
    }

    /// Kind implied by an answer text.
    pub fn of_answer(answer: &str) -> Self {
        if answer == YES || answer == NO {
            QaKind::YesNo
        } else {
            QaKind::Wh
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QAPair {
    pub question: String,
    pub answer: String,
    pub kind: QaKind,
    pub source_fact_id: FactId,
}

impl QAPair {
    /// Builds a pair in normal form; the kind follows from the answer.
    pub fn new(question: &str, answer: &str, source_fact_id: FactId) -> Self {
        let answer = normalize_phrase(answer);
        QAPair {
            question: normalize_question(question),
            kind: QaKind::of_answer(&answer),
            answer,
            source_fact_id,
        }
    }

    pub fn is_yes_no(&self) -> bool {
        self.kind == QaKind::YesNo
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("a consistent set needs at least two QA pairs, got {0}")]
    TooFewQas(usize),
    #[error("QA {index} does not derive from the set's fact")]
    ForeignQa { index: usize },
    #[error("question {0:?} appears twice in the set")]
    DuplicateQuestion(String),
    #[error("yes/no QA {index} has answer {answer:?}")]
    BadYesNoAnswer { index: usize, answer: String },
}

/// QA pairs that all probe one fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistentSet {
    set_id: String,
    fact: Fact,
    qas: Vec<QAPair>,
}

/// Set id derived from a fact id.
pub fn set_id_for(fact_id: FactId) -> String {
    format!("{:016x}", digest_fields(&["set", &fact_id.to_string()]))
}

impl ConsistentSet {
    /// Builds a set whose id is derived from the fact.
    pub fn new(fact: Fact, qas: Vec<QAPair>) -> Result<Self, SetError> {
        let set_id = set_id_for(fact.fact_id());
        Self::with_id(set_id, fact, qas)
    }

    /// Builds a set with an externally assigned id (e.g. read from a file).
    pub fn with_id(set_id: String, fact: Fact, qas: Vec<QAPair>) -> Result<Self, SetError> {
        if qas.len() < 2 {
            return Err(SetError::TooFewQas(qas.len()));
        }
        let mut seen = BTreeSet::new();
        for (index, qa) in qas.iter().enumerate() {
            if qa.source_fact_id != fact.fact_id() {
                return Err(SetError::ForeignQa { index });
            }
            if qa.kind == QaKind::YesNo && qa.answer != YES && qa.answer != NO {
                return Err(SetError::BadYesNoAnswer {
                    index,
                    answer: qa.answer.clone(),
                });
            }
            if !seen.insert(qa.question.as_str()) {
                return Err(SetError::DuplicateQuestion(qa.question.clone()));
            }
        }
        Ok(ConsistentSet { set_id, fact, qas })
    }

    pub fn set_id(&self) -> &str {
        &self.set_id
    }

    pub fn image_id(&self) -> &str {
        self.fact.image_id()
    }

    pub fn fact(&self) -> &Fact {
        &self.fact
    }

    pub fn qas(&self) -> &[QAPair] {
        &self.qas
    }

    pub fn len(&self) -> usize {
        self.qas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qas.is_empty()
    }

    /// Keeps the QAs at `indices`; `None` if fewer than two remain.
    pub fn retain_indices(&self, indices: &BTreeSet<usize>) -> Option<ConsistentSet> {
        let qas: Vec<QAPair> = self
            .qas
            .iter()
            .enumerate()
            .filter(|(i, _)| indices.contains(i))
            .map(|(_, qa)| qa.clone())
            .collect();
        ConsistentSet::with_id(self.set_id.clone(), self.fact.clone(), qas).ok()
    }
}

/// Every template instance derivable from `fact`, in template-table order.
pub fn template_instances(fact: &Fact, lex: &Lexicon) -> Vec<(Slot, String, String)> {
    let s = fact.subject();
    let p = fact.predicate();
    let o = fact.object();
    let mut out = Vec::new();
    match fact.kind() {
        FactKind::Attribute => {
            out.push((Slot::AttrAffirm, templates::attr_yes_no(s, p), YES.to_string()));
            if let Some(antonym) = lex.antonym_of(p) {
                out.push((Slot::AttrAntonym, templates::attr_yes_no(s, antonym), NO.to_string()));
            }
            if let Some(category) = lex.hypernym_of(p) {
                out.push((Slot::AttrWh, templates::attr_wh(category, s), p.to_string()));
            }
        }
        FactKind::Existence => {
            out.push((Slot::Exists, templates::exists(lex, s), YES.to_string()));
        }
        FactKind::Relation => {
            out.push((Slot::RelAffirm, templates::rel_yes_no(s, p, o), YES.to_string()));
            if let Some(opposite) = lex.relation_antonym_of(p) {
                out.push((Slot::RelAntonym, templates::rel_yes_no(s, opposite, o), NO.to_string()));
            }
            out.push((Slot::RelWh, templates::rel_wh(p, o), s.to_string()));
        }
    }
    out
}

/// Template expansion of a single fact; `None` when fewer than two QAs are
/// derivable.
pub fn generate_set(fact: &Fact, lex: &Lexicon) -> Option<ConsistentSet> {
    let qas = template_instances(fact, lex)
        .into_iter()
        .map(|(_, q, a)| QAPair::new(&q, &a, fact.fact_id()))
        .collect();
    ConsistentSet::new(fact.clone(), qas).ok()
}

/// True when every template answer for `fact` is unambiguous under `graph`.
///
/// Scene graphs can hold several same-named objects or several values of one
/// category for an object; questions over such facts have no single answer,
/// so their facts are skipped.
pub fn fact_is_unambiguous(fact: &Fact, graph: &SceneGraph, lex: &Lexicon) -> bool {
    let s = fact.subject();
    let p = fact.predicate();
    let o = fact.object();
    match fact.kind() {
        FactKind::Existence => true,
        FactKind::Attribute => {
            let held = graph.attributes_of(s);
            if p == EMPTY_WORD && graph.is_occupied(s) {
                return false;
            }
            if let Some(antonym) = lex.antonym_of(p)
                && held.contains(antonym)
            {
                return false;
            }
            match lex.hypernym_of(p) {
                Some(category) => !held.iter().any(|a| *a != p && lex.hypernym_of(a) == Some(category)),
                None => true,
            }
        }
        FactKind::Relation => {
            if s == o || graph.subjects_of(p, o).len() != 1 {
                return false;
            }
            if let Some(opposite) = lex.relation_antonym_of(p)
                && graph.relation_holds(s, opposite, o)
            {
                return false;
            }
            !(CONTAINMENT_PREDICATES.contains(&p) && graph.attributes_of(o).contains(EMPTY_WORD))
        }
    }
}

/// Sets for one graph, sorted by fact id.
pub fn generate_for_graph(graph: &SceneGraph, lex: &Lexicon, filter: &FilterConfig) -> Vec<ConsistentSet> {
    extract_facts(graph, filter)
        .iter()
        .filter(|f| fact_is_unambiguous(f, graph, lex))
        .filter_map(|f| generate_set(f, lex))
        .collect()
}

/// A record that failed before generation, with its position in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordError<E> {
    pub index: usize,
    pub error: E,
}

#[derive(Clone, Debug)]
pub struct DatasetOutput<E> {
    pub sets: Vec<ConsistentSet>,
    pub errors: Vec<RecordError<E>>,
}

/// Generates sets for every graph; failed records go to the error channel.
/// Output is ordered by image id, then fact id.
pub fn generate_dataset<I, E>(graphs: I, lex: &Lexicon, filter: &FilterConfig) -> DatasetOutput<E>
where
    I: IntoIterator<Item = Result<SceneGraph, E>>,
{
    let mut sets = Vec::new();
    let mut errors = Vec::new();
    for (index, record) in graphs.into_iter().enumerate() {
        match record {
            Ok(graph) => sets.extend(generate_for_graph(&graph, lex, filter)),
            Err(error) => errors.push(RecordError { index, error }),
        }
    }
    DatasetOutput {
        sets: sort_sets(sets),
        errors,
    }
}

/// Canonical dataset order; duplicate set ids keep their first occurrence.
pub fn sort_sets(mut sets: Vec<ConsistentSet>) -> Vec<ConsistentSet> {
    sets.sort_by(|a, b| (a.image_id(), a.fact().fact_id()).cmp(&(b.image_id(), b.fact().fact_id())));
    let mut seen = BTreeSet::new();
    sets.retain(|s| seen.insert(s.set_id().to_string()));
    sets
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPair {
    pub source: QAPair,
    pub candidate: QAPair,
    pub label: ConsistencyLabel,
}

/// Output of [`corrupt`]. `no_alternative_entity` is set when the graph
/// offered no replacement entity, in which case no Unrelated pairs exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corruption {
    pub pairs: Vec<LabeledPair>,
    pub no_alternative_entity: bool,
}

/// Labeled pairs for checker calibration.
///
/// For each ordered pair of distinct QAs in the set: the pair itself
/// (Consistent), the candidate with its yes/no answer flipped or a lexicon
/// antonym substituted into its wh answer (Inconsistent), and the candidate
/// re-rendered about another entity of the same graph (Unrelated).
pub fn corrupt(set: &ConsistentSet, graph: &SceneGraph, lex: &Lexicon, seed: u64) -> Corruption {
    let fact = set.fact();
    let fact_id = fact.fact_id();
    let alternatives: Vec<&str> = graph.names().into_iter().filter(|n| !fact.mentions(n)).collect();
    let slots: Vec<(Slot, String, String)> = template_instances(fact, lex);
    let slot_of = |qa: &QAPair| slots.iter().find(|(_, q, _)| *q == qa.question).map(|(s, _, _)| *s);

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ digest_fields(&[set.set_id()]));
    let mut pairs = Vec::new();

    for (i, source) in set.qas().iter().enumerate() {
        for (j, candidate) in set.qas().iter().enumerate() {
            if i == j {
                continue;
            }
            pairs.push(LabeledPair {
                source: source.clone(),
                candidate: candidate.clone(),
                label: ConsistencyLabel::Consistent,
            });

            let wrong_answer = match (candidate.kind, slot_of(candidate)) {
                (QaKind::YesNo, _) => Some(flip(&candidate.answer).to_string()),
                (QaKind::Wh, Some(Slot::AttrWh)) => lex.antonym_of(&candidate.answer).map(String::from),
                (QaKind::Wh, Some(Slot::RelWh)) => pick(&mut rng, &alternatives).map(String::from),
                _ => None,
            };
            if let Some(answer) = wrong_answer {
                pairs.push(LabeledPair {
                    source: source.clone(),
                    candidate: QAPair::new(&candidate.question, &answer, fact_id),
                    label: ConsistencyLabel::Inconsistent,
                });
            }

            let Some(slot) = slot_of(candidate) else { continue };
            let Some(other) = pick(&mut rng, &alternatives) else {
                continue;
            };
            if let Some(question) = rerender(slot, fact, other, lex) {
                pairs.push(LabeledPair {
                    source: source.clone(),
                    candidate: QAPair::new(&question, &candidate.answer, fact_id),
                    label: ConsistencyLabel::Unrelated,
                });
            }
        }
    }
    Corruption {
        pairs,
        no_alternative_entity: alternatives.is_empty(),
    }
}

fn flip(answer: &str) -> &'static str {
    if answer == YES { NO } else { YES }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> Option<&'a str> {
    if items.is_empty() {
        return None;
    }
    let idx = (rng.next_u64() % items.len() as u64) as usize;
    Some(items[idx])
}

/// Renders the question of `slot` with the fact's anchoring entity replaced.
fn rerender(slot: Slot, fact: &Fact, other: &str, lex: &Lexicon) -> Option<String> {
    let p = fact.predicate();
    let o = fact.object();
    Some(match slot {
        Slot::AttrAffirm => templates::attr_yes_no(other, p),
        Slot::AttrAntonym => templates::attr_yes_no(other, lex.antonym_of(p)?),
        Slot::AttrWh => templates::attr_wh(lex.hypernym_of(p)?, other),
        Slot::Exists => templates::exists(lex, other),
        Slot::RelAffirm => templates::rel_yes_no(other, p, o),
        Slot::RelAntonym => templates::rel_yes_no(other, lex.relation_antonym_of(p)?, o),
        Slot::RelWh => templates::rel_wh(p, other),
        Slot::Empty => templates::empty(other),
    })
}

/// Split ratios (train, val, test).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.68,
            val: 0.14,
            test: 0.18,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error("split ratios must be non-negative and sum to 1, got ({0}, {1}, {2})")]
    InvalidRatios(f64, f64, f64),
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, SplitError> {
        let r = SplitRatios { train, val, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), SplitError> {
        let parts = [self.train, self.val, self.test];
        let ok = parts.iter().all(|x| x.is_finite() && *x >= 0.0) && (parts.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        if ok {
            Ok(())
        } else {
            Err(SplitError::InvalidRatios(self.train, self.val, self.test))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Partition {
    Train,
    Val,
    Test,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Val => "val",
            Partition::Test => "test",
        }
    }
}

/// Partition of an image, from a stable hash of its id mapped to `[0, 1)`.
pub fn assign_partition(image_id: &str, ratios: &SplitRatios) -> Partition {
    let u = crate::digest::unit_interval(image_id);
    if u < ratios.train {
        Partition::Train
    } else if u < ratios.train + ratios.val {
        Partition::Val
    } else {
        Partition::Test
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<ConsistentSet>,
    pub val: Vec<ConsistentSet>,
    pub test: Vec<ConsistentSet>,
}

/// Splits by image, preserving input order within each partition.
pub fn split_dataset<I>(sets: I, ratios: &SplitRatios) -> Result<DatasetSplit, SplitError>
where
    I: IntoIterator<Item = ConsistentSet>,
{
    ratios.validate()?;
    let mut out = DatasetSplit::default();
    for set in sets {
        match assign_partition(set.image_id(), ratios) {
            Partition::Train => out.train.push(set),
            Partition::Val => out.val.push(set),
            Partition::Test => out.test.push(set),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::SEED_LEXICON;
    use crate::scene_graph::{BoundingBox, ObjectNode, Relation, SceneGraphParts};
    use alloc::vec;

    fn lex() -> Lexicon {
        Lexicon::parse(SEED_LEXICON).unwrap()
    }

    fn questions(set: &ConsistentSet) -> Vec<(&str, &str)> {
        set.qas()
            .iter()
            .map(|q| (q.question.as_str(), q.answer.as_str()))
            .collect()
    }

    fn node(id: &str, name: &str, attrs: &[&str]) -> ObjectNode {
        ObjectNode {
            object_id: id.into(),
            name: name.into(),
            attributes: attrs.iter().map(|a| String::from(*a)).collect(),
            bbox: BoundingBox {
                x: 0,
                y: 0,
                w: 50,
                h: 50,
            },
        }
    }

    fn graph(objects: Vec<ObjectNode>, relations: &[(&str, &str, &str)]) -> SceneGraph {
        SceneGraph::new(SceneGraphParts {
            image_id: "img".into(),
            width: 100,
            height: 100,
            objects,
            relations: relations
                .iter()
                .map(|(s, p, o)| Relation {
                    subject_id: (*s).into(),
                    predicate: (*p).into(),
                    object_id: (*o).into(),
                })
                .collect(),
        })
        .unwrap()
    }

    #[test]
    fn attribute_fact_expands_to_three_questions() {
        let fact = Fact::attribute("i", "cup", "white").unwrap();
        let set = generate_set(&fact, &lex()).unwrap();
        assert_eq!(
            questions(&set),
            vec![
                ("is the cup white?", "yes"),
                ("is the cup black?", "no"),
                ("what color is the cup?", "white"),
            ]
        );
        assert_eq!(set.qas()[2].kind, QaKind::Wh);
        assert_eq!(set.set_id(), set_id_for(fact.fact_id()));
    }

    #[test]
    fn underivable_fact_gives_no_set() {
        let fact = Fact::attribute("i", "pizza", "delicious").unwrap();
        assert_eq!(generate_set(&fact, &lex()), None);
        // existence facts only ever yield one question
        assert_eq!(generate_set(&Fact::existence("i", "cup").unwrap(), &lex()), None);
    }

    #[test]
    fn relation_fact_expands() {
        let fact = Fact::relation("i", "man", "on", "court").unwrap();
        let set = generate_set(&fact, &lex()).unwrap();
        assert_eq!(
            questions(&set),
            vec![
                ("is the man on the court?", "yes"),
                ("is the man under the court?", "no"),
                ("what is on the court?", "man"),
            ]
        );
    }

    #[test]
    fn set_invariants_are_enforced() {
        let fact = Fact::attribute("i", "cup", "white").unwrap();
        let other = Fact::attribute("i", "cup", "black").unwrap();
        let a = QAPair::new("is the cup white?", "yes", fact.fact_id());
        assert_eq!(
            ConsistentSet::new(fact.clone(), vec![a.clone()]),
            Err(SetError::TooFewQas(1))
        );
        assert_eq!(
            ConsistentSet::new(fact.clone(), vec![a.clone(), a.clone()]),
            Err(SetError::DuplicateQuestion("is the cup white?".into()))
        );
        let foreign = QAPair::new("is the cup black?", "yes", other.fact_id());
        assert_eq!(
            ConsistentSet::new(fact, vec![a, foreign]),
            Err(SetError::ForeignQa { index: 1 })
        );
    }

    #[test]
    fn ambiguous_facts_are_skipped() {
        let lex = lex();
        // two colors on one cup: the wh question has no single answer
        let g = graph(vec![node("1", "cup", &["white", "red"])], &[]);
        assert!(!fact_is_unambiguous(
            &Fact::attribute("img", "cup", "white").unwrap(),
            &g,
            &lex
        ));
        // a black cup elsewhere makes the antonym probe false
        let g = graph(vec![node("1", "cup", &["white"]), node("2", "cup", &["black"])], &[]);
        assert!(!fact_is_unambiguous(
            &Fact::attribute("img", "cup", "white").unwrap(),
            &g,
            &lex
        ));
        // two different things on the table
        let g = graph(
            vec![node("1", "cup", &[]), node("2", "plate", &[]), node("3", "table", &[])],
            &[("1", "on", "3"), ("2", "on", "3")],
        );
        assert!(!fact_is_unambiguous(
            &Fact::relation("img", "cup", "on", "table").unwrap(),
            &g,
            &lex
        ));
        let sets = generate_for_graph(&g, &lex, &FilterConfig::identity());
        assert!(sets.is_empty());
    }

    #[test]
    fn dataset_orders_and_reports_errors() {
        let lex = lex();
        let g1 = graph(
            vec![node("1", "cup", &["white"]), node("2", "table", &["wooden"])],
            &[("1", "on", "2")],
        );
        let records: Vec<Result<SceneGraph, &str>> = vec![Ok(g1.clone()), Err("bad"), Ok(g1)];
        let out = generate_dataset(records, &lex, &FilterConfig::identity());
        assert_eq!(out.errors, vec![RecordError { index: 1, error: "bad" }]);
        assert_eq!(out.sets.len(), 3, "cup-white, table-wooden, cup-on-table, deduplicated");
        let keys: Vec<_> = out.sets.iter().map(|s| s.fact().fact_id()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);

        let empty: Vec<Result<SceneGraph, &str>> = Vec::new();
        let out = generate_dataset(empty, &lex, &FilterConfig::identity());
        assert!(out.sets.is_empty() && out.errors.is_empty());
    }

    #[test]
    fn corrupt_labels_pairs() {
        let lex = lex();
        let g = graph(vec![node("1", "cup", &["white"]), node("2", "table", &[])], &[]);
        let fact = Fact::attribute("img", "cup", "white").unwrap();
        let set = generate_set(&fact, &lex).unwrap();
        let out = corrupt(&set, &g, &lex, 7);
        assert!(!out.no_alternative_entity);
        let has = |q: &str, a: &str, label| {
            out.pairs
                .iter()
                .any(|p| p.candidate.question == q && p.candidate.answer == a && p.label == label)
        };
        assert!(has("is the cup white?", "no", ConsistencyLabel::Inconsistent));
        assert!(has("what color is the cup?", "black", ConsistencyLabel::Inconsistent));
        assert!(has("is the table white?", "yes", ConsistencyLabel::Unrelated));
        assert!(has("is the cup black?", "no", ConsistencyLabel::Consistent));
        // 6 ordered pairs, each with a consistent, inconsistent and unrelated variant
        assert_eq!(out.pairs.len(), 18);
        assert_eq!(corrupt(&set, &g, &lex, 7), out);
    }

    #[test]
    fn corrupt_single_object_graph_has_no_unrelated_pairs() {
        let lex = lex();
        let g = graph(vec![node("1", "cup", &["white"])], &[]);
        let set = generate_set(&Fact::attribute("img", "cup", "white").unwrap(), &lex).unwrap();
        let out = corrupt(&set, &g, &lex, 0);
        assert!(out.no_alternative_entity);
        assert!(out.pairs.iter().all(|p| p.label != ConsistencyLabel::Unrelated));
        assert!(out.pairs.iter().any(|p| p.label == ConsistencyLabel::Inconsistent));
        assert!(out.pairs.iter().any(|p| p.label == ConsistencyLabel::Consistent));
    }

    #[test]
    fn split_ratio_validation() {
        assert!(SplitRatios::new(0.68, 0.14, 0.18).is_ok());
        assert!(SplitRatios::new(1.0, 0.0, 0.0).is_ok());
        assert!(matches!(
            SplitRatios::new(0.5, 0.3, 0.1),
            Err(SplitError::InvalidRatios(..))
        ));
        assert!(SplitRatios::new(1.2, -0.2, 0.0).is_err());
        assert!(SplitRatios::new(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn all_train_split() {
        let lex = lex();
        let sets: Vec<ConsistentSet> = (0..20)
            .map(|i| {
                let f = Fact::attribute(&format!("img{i}"), "cup", "white").unwrap();
                generate_set(&f, &lex).unwrap()
            })
            .collect();
        let split = split_dataset(sets.clone(), &SplitRatios::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(split.train, sets);
        assert!(split.val.is_empty() && split.test.is_empty());
    }
}
