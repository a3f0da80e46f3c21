//! JSONL and TSV file formats.

use std::collections::BTreeMap;

use convqa_core::checker::ConsistencyLabel;
use convqa_core::qa_gen::{LabeledPair, SetError};
use convqa_core::scene_graph::{BoundingBox, FactError, ObjectNode, Relation, SceneGraphError, SceneGraphParts};
use convqa_core::{ConsistentSet, Fact, FactKind, QAPair, QaKind, SceneGraph};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: malformed input at byte {offset}: {message}")]
    MalformedInput {
        line: usize,
        offset: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    InvalidGraph { line: usize, source: SceneGraphError },
    #[error("line {line}: {message}")]
    InvalidRecord { line: usize, message: String },
}

impl FormatError {
    pub fn line(&self) -> usize {
        match self {
            FormatError::MalformedInput { line, .. }
            | FormatError::InvalidGraph { line, .. }
            | FormatError::InvalidRecord { line, .. } => *line,
        }
    }
}

/// Non-blank lines with their 1-based line number and starting byte offset.
pub fn lines_with_offsets(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    let mut offset = 0;
    text.split_inclusive('\n').enumerate().filter_map(move |(i, raw)| {
        let start = offset;
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        (!line.trim().is_empty()).then_some((i + 1, start, line))
    })
}

fn parse_line<T: DeserializeOwned>(line_no: usize, start: usize, line: &str) -> Result<T, FormatError> {
    serde_json::from_str(line).map_err(|e| FormatError::MalformedInput {
        line: line_no,
        offset: start + e.column().saturating_sub(1),
        message: e.to_string(),
    })
}

/// Parses every record of a JSONL document.
pub fn read_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, FormatError> {
    lines_with_offsets(text)
        .map(|(n, start, line)| parse_line(n, start, line))
        .collect()
}

/// One compact JSON document per line, newline-terminated.
pub fn write_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub object_id: String,
    pub name: String,
    #[serde(default)]
    pub attributes: Vec<String>,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationRecord {
    pub subject_id: String,
    pub predicate: String,
    pub object_id: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphRecord {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub objects: Vec<ObjectRecord>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
}

impl GraphRecord {
    pub fn into_graph(self) -> Result<SceneGraph, SceneGraphError> {
        SceneGraph::new(SceneGraphParts {
            image_id: self.image_id,
            width: self.width,
            height: self.height,
            objects: self
                .objects
                .into_iter()
                .map(|o| ObjectNode {
                    object_id: o.object_id,
                    name: o.name,
                    attributes: o.attributes,
                    bbox: BoundingBox {
                        x: o.x,
                        y: o.y,
                        w: o.w,
                        h: o.h,
                    },
                })
                .collect(),
            relations: self
                .relations
                .into_iter()
                .map(|r| Relation {
                    subject_id: r.subject_id,
                    predicate: r.predicate,
                    object_id: r.object_id,
                })
                .collect(),
        })
    }

    pub fn from_graph(g: &SceneGraph) -> Self {
        GraphRecord {
            image_id: g.image_id().to_string(),
            width: g.width(),
            height: g.height(),
            objects: g
                .objects()
                .iter()
                .map(|o| ObjectRecord {
                    object_id: o.object_id.clone(),
                    name: o.name.clone(),
                    attributes: o.attributes.clone(),
                    x: o.bbox.x,
                    y: o.bbox.y,
                    w: o.bbox.w,
                    h: o.bbox.h,
                })
                .collect(),
            relations: g
                .relations()
                .iter()
                .map(|r| RelationRecord {
                    subject_id: r.subject_id.clone(),
                    predicate: r.predicate.clone(),
                    object_id: r.object_id.clone(),
                })
                .collect(),
        }
    }
}

/// Parses one scene-graph line. `start` is the line's byte offset in the
/// file, used for syntax-error positions.
pub fn parse_graph_line(line_no: usize, start: usize, line: &str) -> Result<SceneGraph, FormatError> {
    let record: GraphRecord = parse_line(line_no, start, line)?;
    record
        .into_graph()
        .map_err(|source| FormatError::InvalidGraph { line: line_no, source })
}

/// Every scene-graph record of a JSONL document; bad records become errors
/// in place without stopping the rest.
pub fn read_graphs(text: &str) -> Vec<Result<SceneGraph, FormatError>> {
    lines_with_offsets(text)
        .map(|(n, start, line)| parse_graph_line(n, start, line))
        .collect()
}

/// Reads graphs strictly, failing on the first bad record.
pub fn read_graphs_strict(text: &str) -> Result<Vec<SceneGraph>, FormatError> {
    read_graphs(text).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactRecord {
    pub kind: String,
    pub subject: String,
    #[serde(default)]
    pub predicate: String,
    #[serde(default)]
    pub object: String,
}

impl FactRecord {
    pub fn from_fact(f: &Fact) -> Self {
        FactRecord {
            kind: f.kind().as_str().to_string(),
            subject: f.subject().to_string(),
            predicate: f.predicate().to_string(),
            object: f.object().to_string(),
        }
    }

    pub fn to_fact(&self, image_id: &str) -> Result<Fact, String> {
        let kind = FactKind::parse(&self.kind).ok_or_else(|| format!("unknown fact kind {:?}", self.kind))?;
        Fact::new(image_id, kind, &self.subject, &self.predicate, &self.object).map_err(|e: FactError| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaRecord {
    pub question: String,
    pub answer: String,
    pub kind: String,
}

impl QaRecord {
    pub fn from_qa(qa: &QAPair) -> Self {
        QaRecord {
            question: qa.question.clone(),
            answer: qa.answer.clone(),
            kind: qa.kind.as_str().to_string(),
        }
    }

    pub fn to_qa(&self, fact: &Fact) -> Result<QAPair, String> {
        let declared = QaKind::parse(&self.kind).ok_or_else(|| format!("unknown QA kind {:?}", self.kind))?;
        let qa = QAPair::new(&self.question, &self.answer, fact.fact_id());
        if qa.kind != declared {
            return Err(format!(
                "QA {:?} is declared {} but its answer {:?} makes it {}",
                qa.question,
                declared.as_str(),
                qa.answer,
                qa.kind.as_str()
            ));
        }
        Ok(qa)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRecord {
    pub set_id: String,
    pub image_id: String,
    pub fact: FactRecord,
    pub qas: Vec<QaRecord>,
}

impl SetRecord {
    pub fn from_set(s: &ConsistentSet) -> Self {
        SetRecord {
            set_id: s.set_id().to_string(),
            image_id: s.image_id().to_string(),
            fact: FactRecord::from_fact(s.fact()),
            qas: s.qas().iter().map(QaRecord::from_qa).collect(),
        }
    }

    pub fn to_set(&self) -> Result<ConsistentSet, String> {
        let fact = self.fact.to_fact(&self.image_id)?;
        let qas = self.qas.iter().map(|q| q.to_qa(&fact)).collect::<Result<Vec<_>, _>>()?;
        ConsistentSet::with_id(self.set_id.clone(), fact, qas).map_err(|e: SetError| e.to_string())
    }
}

pub fn read_sets(text: &str) -> Result<Vec<ConsistentSet>, FormatError> {
    lines_with_offsets(text)
        .map(|(n, start, line)| {
            let rec: SetRecord = parse_line(n, start, line)?;
            rec.to_set()
                .map_err(|message| FormatError::InvalidRecord { line: n, message })
        })
        .collect()
}

pub fn write_sets(sets: &[ConsistentSet]) -> String {
    let records: Vec<SetRecord> = sets.iter().map(SetRecord::from_set).collect();
    write_jsonl(&records)
}

/// A labeled pair plus the set context a checker needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub set_id: String,
    pub image_id: String,
    pub fact: FactRecord,
    pub source: QaRecord,
    pub candidate: QaRecord,
    pub label: String,
}

impl PairRecord {
    pub fn new(set: &ConsistentSet, pair: &LabeledPair) -> Self {
        PairRecord {
            set_id: set.set_id().to_string(),
            image_id: set.image_id().to_string(),
            fact: FactRecord::from_fact(set.fact()),
            source: QaRecord::from_qa(&pair.source),
            candidate: QaRecord::from_qa(&pair.candidate),
            label: pair.label.as_str().to_string(),
        }
    }

    /// The fact, the source QA, the candidate QA and the gold label.
    pub fn decode(&self) -> Result<(Fact, QAPair, QAPair, ConsistencyLabel), String> {
        let fact = self.fact.to_fact(&self.image_id)?;
        let label = ConsistencyLabel::parse(&self.label).ok_or_else(|| format!("unknown label {:?}", self.label))?;
        let source = self.source.to_qa(&fact)?;
        // Candidates may be about other entities, so their kind is taken as is.
        let candidate = QAPair::new(&self.candidate.question, &self.candidate.answer, fact.fact_id());
        Ok((fact, source, candidate, label))
    }
}

pub fn read_pairs(text: &str) -> Result<Vec<PairRecord>, FormatError> {
    let records: Vec<PairRecord> = read_jsonl(text)?;
    for (i, r) in records.iter().enumerate() {
        r.decode()
            .map_err(|message| FormatError::InvalidRecord { line: i + 1, message })?;
    }
    Ok(records)
}

/// One line of checker batch output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub label: String,
    pub confidence: f64,
    pub gold_label: String,
}

/// Reads a `name<TAB>count` table. Blank lines and `#` comments are skipped.
pub fn read_name_counts(text: &str) -> Result<BTreeMap<String, u64>, FormatError> {
    let mut out = BTreeMap::new();
    for (n, _, line) in lines_with_offsets(text) {
        if line.starts_with('#') {
            continue;
        }
        let (name, count) = line.split_once('\t').ok_or_else(|| FormatError::InvalidRecord {
            line: n,
            message: "expected name<TAB>count".into(),
        })?;
        let count: u64 = count.trim().parse().map_err(|_| FormatError::InvalidRecord {
            line: n,
            message: format!("count {count:?} is not a non-negative integer"),
        })?;
        *out.entry(convqa_core::text::normalize_phrase(name)).or_insert(0) += count;
    }
    Ok(out)
}
