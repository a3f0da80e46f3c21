//! The fixed question template inventory.
//!
//! | slot          | question                         | answer      |
//! |---------------|----------------------------------|-------------|
//! | `AttrAffirm`  | is the {subject} {attr}?         | yes         |
//! | `AttrAntonym` | is the {subject} {antonym}?      | no          |
//! | `AttrWh`      | what {hypernym} is the {subject}?| {attr}      |
//! | `Exists`      | is there {a/an} {subject}?       | yes         |
//! | `RelAffirm`   | is the {subject} {pred} the {object}? | yes    |
//! | `RelAntonym`  | is the {subject} {opposite} the {object}? | no |
//! | `RelWh`       | what is {pred} the {object}?     | {subject}   |
//! | `Empty`       | is the {object} empty?           | no          |
//!
//! Changing this table changes generated datasets; bump
//! [`TEMPLATE_VERSION`] when doing so.

use alloc::format;
use alloc::string::String;

use crate::lexicon::Lexicon;

/// Version of the template inventory recorded alongside generated datasets.
pub const TEMPLATE_VERSION: u32 = 1;

pub const YES: &str = "yes";
pub const NO: &str = "no";

/// Word that turns an `is the X ...?` question into an emptiness probe.
pub const EMPTY_WORD: &str = "empty";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    AttrAffirm,
    AttrAntonym,
    AttrWh,
    Exists,
    RelAffirm,
    RelAntonym,
    RelWh,
    Empty,
}

pub fn attr_yes_no(subject: &str, attribute: &str) -> String {
    format!("is the {subject} {attribute}?")
}

pub fn attr_wh(category: &str, subject: &str) -> String {
    format!("what {category} is the {subject}?")
}

pub fn exists(lex: &Lexicon, entity: &str) -> String {
    format!("is there {}?", lex.surface_forms(entity).np_with_article)
}

pub fn rel_yes_no(subject: &str, predicate: &str, object: &str) -> String {
    format!("is the {subject} {predicate} the {object}?")
}

pub fn rel_wh(predicate: &str, object: &str) -> String {
    format!("what is {predicate} the {object}?")
}

pub fn empty(entity: &str) -> String {
    format!("is the {entity} {EMPTY_WORD}?")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::SEED_LEXICON;

    #[test]
    fn renders_templates() {
        let lex = Lexicon::parse(SEED_LEXICON).unwrap();
        assert_eq!(attr_yes_no("cup", "white"), "is the cup white?");
        assert_eq!(attr_wh("color", "cup"), "what color is the cup?");
        assert_eq!(exists(&lex, "umbrella"), "is there an umbrella?");
        assert_eq!(exists(&lex, "grass"), "is there grass?");
        assert_eq!(rel_yes_no("man", "on", "court"), "is the man on the court?");
        assert_eq!(rel_wh("on", "court"), "what is on the court?");
        assert_eq!(empty("court"), "is the court empty?");
    }
}
