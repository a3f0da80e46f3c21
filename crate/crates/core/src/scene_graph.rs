//! Scene graphs and the visual facts extracted from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::digest::digest_fields;
use crate::text::normalize_phrase;

/// Predicates whose object counts as "occupied" by the subject.
pub const CONTAINMENT_PREDICATES: &[&str] = &["on", "in"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BoundingBox {
    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectNode {
    pub object_id: String,
    pub name: String,
    pub attributes: Vec<String>,
    pub bbox: BoundingBox,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub subject_id: String,
    pub predicate: String,
    pub object_id: String,
}

/// Unvalidated scene-graph contents as read from a record.
#[derive(Clone, Debug, Default)]
pub struct SceneGraphParts {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub objects: Vec<ObjectNode>,
    pub relations: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SceneGraphError {
    #[error("image_id is empty")]
    EmptyImageId,
    #[error("image dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("scene graph has no objects")]
    EmptyGraph,
    #[error("object {object_id:?} has an empty name")]
    EmptyName { object_id: String },
    #[error("object {object_id:?} has a degenerate bounding box")]
    InvalidBoundingBox { object_id: String },
    #[error("object id {object_id:?} appears more than once")]
    DuplicateObjectId { object_id: String },
    #[error("relation {index} references unknown object {object_id:?}")]
    DanglingReference { index: usize, object_id: String },
    #[error("relation {index} relates object {object_id:?} to itself")]
    SelfRelation { index: usize, object_id: String },
    #[error("relation {index} has an empty predicate")]
    EmptyPredicate { index: usize },
}

/// A validated scene graph. Names, attributes and predicates are in phrase
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneGraph {
    image_id: String,
    width: u32,
    height: u32,
    objects: Vec<ObjectNode>,
    relations: Vec<Relation>,
}

impl SceneGraph {
    /// Normalizes and validates `parts`. Graphs without objects are rejected.
    pub fn new(parts: SceneGraphParts) -> Result<Self, SceneGraphError> {
        if parts.objects.is_empty() {
            if parts.image_id.trim().is_empty() {
                return Err(SceneGraphError::EmptyImageId);
            }
            return Err(SceneGraphError::EmptyGraph);
        }
        Self::build(parts)
    }

    fn build(parts: SceneGraphParts) -> Result<Self, SceneGraphError> {
        let image_id = String::from(parts.image_id.trim());
        if image_id.is_empty() {
            return Err(SceneGraphError::EmptyImageId);
        }
        if parts.width == 0 || parts.height == 0 {
            return Err(SceneGraphError::InvalidDimensions {
                width: parts.width,
                height: parts.height,
            });
        }

        let mut seen = BTreeSet::new();
        let mut objects = Vec::with_capacity(parts.objects.len());
        for obj in parts.objects {
            let object_id = String::from(obj.object_id.trim());
            if !seen.insert(object_id.clone()) {
                return Err(SceneGraphError::DuplicateObjectId { object_id });
            }
            let name = normalize_phrase(&obj.name);
            if name.is_empty() {
                return Err(SceneGraphError::EmptyName { object_id });
            }
            if obj.bbox.w == 0 || obj.bbox.h == 0 {
                return Err(SceneGraphError::InvalidBoundingBox { object_id });
            }
            let mut attributes: Vec<String> = Vec::new();
            for attr in &obj.attributes {
                let attr = normalize_phrase(attr);
                if !attr.is_empty() && !attributes.contains(&attr) {
                    attributes.push(attr);
                }
            }
            objects.push(ObjectNode {
                object_id,
                name,
                attributes,
                bbox: obj.bbox,
            });
        }

        let mut relations = Vec::with_capacity(parts.relations.len());
        for (index, rel) in parts.relations.into_iter().enumerate() {
            let subject_id = String::from(rel.subject_id.trim());
            let object_id = String::from(rel.object_id.trim());
            for id in [&subject_id, &object_id] {
                if !seen.contains(id) {
                    return Err(SceneGraphError::DanglingReference {
                        index,
                        object_id: id.clone(),
                    });
                }
            }
            if subject_id == object_id {
                return Err(SceneGraphError::SelfRelation { index, object_id });
            }
            let predicate = normalize_phrase(&rel.predicate);
            if predicate.is_empty() {
                return Err(SceneGraphError::EmptyPredicate { index });
            }
            relations.push(Relation {
                subject_id,
                predicate,
                object_id,
            });
        }

        Ok(SceneGraph {
            image_id,
            width: parts.width,
            height: parts.height,
            objects,
            relations,
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn objects(&self) -> &[ObjectNode] {
        &self.objects
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn object(&self, object_id: &str) -> Option<&ObjectNode> {
        self.objects.iter().find(|o| o.object_id == object_id)
    }

    pub fn image_area(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }

    /// Distinct object names, sorted.
    pub fn names(&self) -> BTreeSet<&str> {
        self.objects.iter().map(|o| o.name.as_str()).collect()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.objects.iter().any(|o| o.name == name)
    }

    /// Union of attributes over every object called `name`.
    pub fn attributes_of(&self, name: &str) -> BTreeSet<&str> {
        self.objects
            .iter()
            .filter(|o| o.name == name)
            .flat_map(|o| o.attributes.iter().map(String::as_str))
            .collect()
    }

    /// Relations resolved to `(subject name, predicate, object name)`.
    pub fn named_relations(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.relations.iter().filter_map(move |r| {
            let s = self.object(&r.subject_id)?;
            let o = self.object(&r.object_id)?;
            Some((s.name.as_str(), r.predicate.as_str(), o.name.as_str()))
        })
    }

    pub fn relation_holds(&self, subject: &str, predicate: &str, object: &str) -> bool {
        self.named_relations()
            .any(|(s, p, o)| s == subject && p == predicate && o == object)
    }

    /// Distinct subject names standing in `predicate` to some object called `object`.
    pub fn subjects_of(&self, predicate: &str, object: &str) -> BTreeSet<&str> {
        self.named_relations()
            .filter(|(_, p, o)| *p == predicate && *o == object)
            .map(|(s, _, _)| s)
            .collect()
    }

    /// True when something is on or in an object called `name`.
    pub fn is_occupied(&self, name: &str) -> bool {
        self.named_relations()
            .any(|(_, p, o)| o == name && CONTAINMENT_PREDICATES.contains(&p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactKind {
    Attribute,
    Existence,
    Relation,
}

impl FactKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FactKind::Attribute => "attribute",
            FactKind::Existence => "existence",
            FactKind::Relation => "relation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "attribute" => Some(FactKind::Attribute),
            "existence" => Some(FactKind::Existence),
            "relation" => Some(FactKind::Relation),
            _ => None,
        }
    }
}

impl fmt::Display for FactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Digest of a fact's canonical fields. Rendered as 16 lowercase hex digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactId(pub u64);

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactError {
    #[error("fact subject is empty")]
    EmptySubject,
    #[error("{kind} fact requires a predicate")]
    MissingPredicate { kind: FactKind },
    #[error("{kind} fact requires an object")]
    MissingObject { kind: FactKind },
    #[error("{kind} fact must not carry {field}")]
    UnexpectedField { kind: FactKind, field: &'static str },
}

/// A single visual fact: one attribute, existence or relation triplet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    image_id: String,
    kind: FactKind,
    subject: String,
    predicate: String,
    object: String,
    fact_id: FactId,
}

impl Fact {
    /// Builds a fact from raw fields, normalizing text and checking the
    /// per-kind shape rules.
    pub fn new(
        image_id: &str,
        kind: FactKind,
        subject: &str,
        predicate: &str,
        object: &str,
    ) -> Result<Self, FactError> {
        let subject = normalize_phrase(subject);
        let predicate = normalize_phrase(predicate);
        let object = normalize_phrase(object);
        if subject.is_empty() {
            return Err(FactError::EmptySubject);
        }
        match kind {
            FactKind::Attribute => {
                if predicate.is_empty() {
                    return Err(FactError::MissingPredicate { kind });
                }
                if !object.is_empty() {
                    return Err(FactError::UnexpectedField { kind, field: "object" });
                }
            }
            FactKind::Existence => {
                if !predicate.is_empty() {
                    return Err(FactError::UnexpectedField {
                        kind,
                        field: "predicate",
                    });
                }
                if !object.is_empty() {
                    return Err(FactError::UnexpectedField { kind, field: "object" });
                }
            }
            FactKind::Relation => {
                if predicate.is_empty() {
                    return Err(FactError::MissingPredicate { kind });
                }
                if object.is_empty() {
                    return Err(FactError::MissingObject { kind });
                }
            }
        }
        let image_id = String::from(image_id.trim());
        let fact_id = FactId(digest_fields(&[
            &image_id,
            kind.as_str(),
            &subject,
            &predicate,
            &object,
        ]));
        Ok(Fact {
            image_id,
            kind,
            subject,
            predicate,
            object,
            fact_id,
        })
    }

    pub fn attribute(image_id: &str, subject: &str, attribute: &str) -> Result<Self, FactError> {
        Fact::new(image_id, FactKind::Attribute, subject, attribute, "")
    }

    pub fn existence(image_id: &str, subject: &str) -> Result<Self, FactError> {
        Fact::new(image_id, FactKind::Existence, subject, "", "")
    }

    pub fn relation(image_id: &str, subject: &str, predicate: &str, object: &str) -> Result<Self, FactError> {
        Fact::new(image_id, FactKind::Relation, subject, predicate, object)
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn kind(&self) -> FactKind {
        self.kind
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    /// Attribute value for attribute facts, relation predicate for relation
    /// facts, empty for existence facts.
    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn object(&self) -> &str {
        &self.object
    }

    pub fn fact_id(&self) -> FactId {
        self.fact_id
    }

    /// Entity names the fact talks about.
    pub fn entities(&self) -> impl Iterator<Item = &str> {
        core::iter::once(self.subject.as_str()).chain((!self.object.is_empty()).then_some(self.object.as_str()))
    }

    pub fn mentions(&self, entity: &str) -> bool {
        self.entities().any(|e| e == entity)
    }
}

/// Saliency and frequency thresholds for fact extraction.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterConfig {
    /// Minimum bbox area as a fraction of the image area.
    pub min_area_fraction: f64,
    /// Minimum corpus count of an object name. Only applied when
    /// `name_counts` is present.
    pub min_name_count: u64,
    pub name_counts: Option<BTreeMap<String, u64>>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_area_fraction: 0.05,
            min_name_count: 2,
            name_counts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterConfigError {
    #[error("min_area_fraction must lie in [0, 1], got {0}")]
    AreaFraction(f64),
}

impl FilterConfig {
    /// A filter that keeps everything.
    pub fn identity() -> Self {
        FilterConfig {
            min_area_fraction: 0.0,
            min_name_count: 0,
            name_counts: None,
        }
    }

    pub fn validate(&self) -> Result<(), FilterConfigError> {
        if !(0.0..=1.0).contains(&self.min_area_fraction) {
            return Err(FilterConfigError::AreaFraction(self.min_area_fraction));
        }
        Ok(())
    }

    fn keeps(&self, obj: &ObjectNode, image_area: u64) -> bool {
        let fraction = obj.bbox.area() as f64 / image_area as f64;
        if fraction < self.min_area_fraction {
            return false;
        }
        match &self.name_counts {
            Some(counts) => counts.get(&obj.name).copied().unwrap_or(0) >= self.min_name_count,
            None => true,
        }
    }
}

/// Drops non-salient and infrequent objects plus every relation touching them.
pub fn filter_salient(graph: &SceneGraph, filter: &FilterConfig) -> SceneGraph {
    let area = graph.image_area();
    let objects: Vec<ObjectNode> = graph
        .objects
        .iter()
        .filter(|o| filter.keeps(o, area))
        .cloned()
        .collect();
    let kept: BTreeSet<&str> = objects.iter().map(|o| o.object_id.as_str()).collect();
    let relations = graph
        .relations
        .iter()
        .filter(|r| kept.contains(r.subject_id.as_str()) && kept.contains(r.object_id.as_str()))
        .cloned()
        .collect();
    SceneGraph {
        image_id: graph.image_id.clone(),
        width: graph.width,
        height: graph.height,
        objects,
        relations,
    }
}

/// Facts of the filtered graph, deduplicated and sorted by fact id.
pub fn extract_facts(graph: &SceneGraph, filter: &FilterConfig) -> Vec<Fact> {
    let g = filter_salient(graph, filter);
    let image = g.image_id();
    let mut facts: BTreeMap<FactId, Fact> = BTreeMap::new();
    let mut push = |fact: Result<Fact, FactError>| {
        // Validated graphs only yield well-formed facts.
        if let Ok(f) = fact {
            facts.entry(f.fact_id()).or_insert(f);
        }
    };
    for obj in g.objects() {
        push(Fact::existence(image, &obj.name));
        for attr in &obj.attributes {
            push(Fact::attribute(image, &obj.name, attr));
        }
    }
    for (s, p, o) in g.named_relations() {
        push(Fact::relation(image, s, p, o));
    }
    facts.into_values().collect()
}
