#![allow(dead_code)]

//! Test-only helpers: fixture loading and a brute-force fact checker that
//! reads the raw JSON and lexicon text itself, sharing no code with the
//! library's parser or scene-graph model.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::OnceLock;

use regex::Regex;
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn seed_lexicon_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/seed_lexicon.txt")
}

fn norm(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Names, attributes and named relations of one image.
#[derive(Debug, Default)]
pub struct RawGraph {
    pub names: BTreeSet<String>,
    pub attrs: BTreeMap<String, BTreeSet<String>>,
    pub relations: BTreeSet<(String, String, String)>,
}

impl RawGraph {
    fn attrs_of(&self, name: &str) -> BTreeSet<String> {
        self.attrs.get(name).cloned().unwrap_or_default()
    }

    fn holds(&self, s: &str, p: &str, o: &str) -> bool {
        self.relations.contains(&(s.to_string(), p.to_string(), o.to_string()))
    }

    fn occupied(&self, name: &str) -> bool {
        self.relations
            .iter()
            .any(|(_, p, o)| o == name && (p == "on" || p == "in"))
    }
}

pub fn raw_graphs(text: &str) -> BTreeMap<String, RawGraph> {
    let mut out = BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(line).unwrap();
        let mut g = RawGraph::default();
        let mut by_id = BTreeMap::new();
        for o in v["objects"].as_array().unwrap() {
            let name = norm(o["name"].as_str().unwrap());
            by_id.insert(o["object_id"].as_str().unwrap().to_string(), name.clone());
            g.names.insert(name.clone());
            let entry = g.attrs.entry(name).or_default();
            for a in o["attributes"].as_array().unwrap() {
                entry.insert(norm(a.as_str().unwrap()));
            }
        }
        for r in v["relations"].as_array().unwrap() {
            let s = by_id[r["subject_id"].as_str().unwrap()].clone();
            let o = by_id[r["object_id"].as_str().unwrap()].clone();
            g.relations.insert((s, norm(r["predicate"].as_str().unwrap()), o));
        }
        out.insert(v["image_id"].as_str().unwrap().to_string(), g);
    }
    out
}

/// Attribute categories from the lexicon text.
#[derive(Debug, Default)]
pub struct RawLexicon {
    pub category_of: BTreeMap<String, String>,
    pub categories: BTreeSet<String>,
}

pub fn raw_lexicon(text: &str) -> RawLexicon {
    let mut lex = RawLexicon::default();
    let entry = Regex::new(r"^([a-z ]+):\s*[a-z ,]*\|\s*([a-z]+)\s*$").unwrap();
    for line in text.lines() {
        if let Some(cats) = line.strip_prefix("#categories:") {
            lex.categories = cats.split(',').map(|c| c.trim().to_string()).collect();
        } else if line.starts_with("#relations") {
            break;
        } else if let Some(c) = entry.captures(line) {
            lex.category_of.insert(c[1].trim().to_string(), c[2].to_string());
        }
    }
    lex
}

struct Patterns {
    exists: Regex,
    empty: Regex,
    attr_wh: Regex,
    rel_wh: Regex,
    is_the: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        exists: Regex::new(r"^is there (?:(?:a|an) )?(.+)\?$").unwrap(),
        empty: Regex::new(r"^is the (.+) empty\?$").unwrap(),
        attr_wh: Regex::new(r"^what ([a-z]+) is the (.+)\?$").unwrap(),
        rel_wh: Regex::new(r"^what is (.+)\?$").unwrap(),
        is_the: Regex::new(r"^is the (.+)\?$").unwrap(),
    })
}

/// Every way to cut `text` at a space into (left, right).
fn cuts(text: &str) -> Vec<(&str, &str)> {
    text.match_indices(' ')
        .map(|(i, _)| (&text[..i], &text[i + 1..]))
        .collect()
}

/// Every way to cut `text` around a " the " into (left, right).
fn the_cuts(text: &str) -> Vec<(&str, &str)> {
    text.match_indices(" the ")
        .map(|(i, _)| (&text[..i], &text[i + 5..]))
        .collect()
}

fn unique<I: IntoIterator<Item = String>>(items: I) -> Option<String> {
    let set: BTreeSet<String> = items.into_iter().collect();
    (set.len() == 1).then(|| set.into_iter().next().unwrap())
}

/// Checks one QA pair against the graph by enumerating every reading of the
/// question. A "yes" needs some reading to hold, a "no" needs at least one
/// reading and none holding, and a wh answer must be the unique value.
pub fn brute_force_check(question: &str, answer: &str, g: &RawGraph, lex: &RawLexicon) -> Result<(), String> {
    let p = patterns();
    let fail = |why: &str| Err(format!("{question:?} -> {answer:?}: {why}"));
    let expect_bool = |readings: Vec<bool>| -> Result<(), String> {
        if readings.is_empty() {
            return fail("no reading of the question mentions graph entities");
        }
        let truth = readings.iter().any(|b| *b);
        match (answer, truth) {
            ("yes", true) => Ok(()),
            ("no", false) => Ok(()),
            ("yes" | "no", _) => fail(&format!("graph says {}", if truth { "yes" } else { "no" })),
            _ => fail("yes/no question with a non yes/no answer"),
        }
    };

    if let Some(c) = p.exists.captures(question) {
        return expect_bool(vec![g.names.contains(&c[1])]);
    }
    if let Some(c) = p.empty.captures(question)
        && g.names.contains(&c[1])
    {
        return expect_bool(vec![!g.occupied(&c[1])]);
    }
    if let Some(c) = p.attr_wh.captures(question)
        && lex.categories.contains(&c[1])
    {
        let values = g
            .attrs_of(&c[2])
            .into_iter()
            .filter(|a| lex.category_of.get(a).map(String::as_str) == Some(&c[1]));
        return match unique(values) {
            Some(v) if v == answer => Ok(()),
            Some(v) => fail(&format!("graph says {v:?}")),
            None => fail("the graph has no single value for this category"),
        };
    }
    if let Some(c) = p.rel_wh.captures(question) {
        let mut answers = Vec::new();
        for (pred, obj) in the_cuts(&c[1]) {
            let subjects: Vec<String> = g
                .relations
                .iter()
                .filter(|(_, rp, ro)| rp == pred && ro == obj)
                .map(|(s, _, _)| s.clone())
                .collect();
            if !subjects.is_empty() {
                answers.push(unique(subjects));
            }
        }
        return match answers.as_slice() {
            [Some(s)] if s == answer => Ok(()),
            [Some(s)] => fail(&format!("graph says {s:?}")),
            [] => fail("no relation matches"),
            _ => fail("ambiguous relation question"),
        };
    }
    if let Some(c) = p.is_the.captures(question) {
        let rest = &c[1];
        let mut readings = Vec::new();
        for (left, obj) in the_cuts(rest) {
            if !g.names.contains(obj) {
                continue;
            }
            for (subj, pred) in cuts(left) {
                if g.names.contains(subj) {
                    readings.push(g.holds(subj, pred, obj));
                }
            }
        }
        for (subj, attr) in cuts(rest) {
            if g.names.contains(subj) {
                readings.push(g.attrs_of(subj).contains(attr));
            }
        }
        return expect_bool(readings);
    }
    fail("question matches no template")
}
