//! Normal forms for phrases, questions and answers.
//!
//! Every comparison downstream of ingestion happens on these forms, so the
//! rules here are load-bearing for fact ids, set ids and metric matching.

use alloc::string::String;

const TERMINAL_PUNCTUATION: &[char] = &['.', ',', ';', ':', '!', '?'];

/// Lowercase, trim, collapse internal whitespace and strip terminal punctuation.
pub fn normalize_phrase(text: &str) -> String {
    let lowered = text.to_lowercase();
    let trimmed = lowered
        .trim()
        .trim_end_matches(|c: char| TERMINAL_PUNCTUATION.contains(&c) || c.is_whitespace());
    collapse_whitespace(trimmed)
}

/// Normal form of a question: a normalized phrase terminated by a single `?`.
pub fn normalize_question(text: &str) -> String {
    let mut q = normalize_phrase(text);
    q.push('?');
    q
}

/// Normal form used for exact-match answer scoring.
///
/// Lowercases, strips all punctuation, removes one leading article and
/// collapses whitespace. `"A Man."` becomes `"man"`.
pub fn normalize_answer(text: &str) -> String {
    let lowered = text.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_ascii_punctuation() { ' ' } else { c })
        .collect();
    let collapsed = collapse_whitespace(cleaned.trim());
    for article in ["a ", "an ", "the "] {
        if let Some(rest) = collapsed.strip_prefix(article) {
            return String::from(rest);
        }
    }
    collapsed
}

/// True when `text` already equals its phrase normal form.
pub fn is_normal_phrase(text: &str) -> bool {
    normalize_phrase(text) == text
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
