//! User turns and episodes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::Name;

/// One user turn. Payload values are carried along but never inspected by the semantics.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Utterance {
    answers: BTreeSet<Name>,
    payloads: BTreeMap<Name, String>,
}

impl Utterance {
    pub fn single(name: &str) -> Self {
        Utterance { answers: BTreeSet::from([Name::new(name)]), payloads: BTreeMap::new() }
    }

    /// None when `names` is empty.
    pub fn of<I, N>(names: I) -> Option<Self>
    where
        I: IntoIterator<Item = N>,
        N: Into<Name>,
    {
        let answers: BTreeSet<Name> = names.into_iter().map(Into::into).collect();
        if answers.is_empty() {
            return None;
        }
        Some(Utterance { answers, payloads: BTreeMap::new() })
    }

    pub fn from_set(answers: BTreeSet<Name>) -> Option<Self> {
        if answers.is_empty() {
            None
        } else {
            Some(Utterance { answers, payloads: BTreeMap::new() })
        }
    }

    pub fn answers(&self) -> &BTreeSet<Name> {
        &self.answers
    }

    pub fn payloads(&self) -> &BTreeMap<Name, String> {
        &self.payloads
    }

    pub fn payload(&self, name: &Name) -> Option<&str> {
        self.payloads.get(name).map(String::as_str)
    }

    /// Attaches a value to an answered name. Ignored for names not in the turn.
    pub fn with_payload(mut self, name: &str, value: &str) -> Self {
        let n = Name::new(name);
        if self.answers.contains(&n) {
            self.payloads.insert(n, value.into());
        }
        self
    }

    pub fn without_payloads(&self) -> Self {
        Utterance { answers: self.answers.clone(), payloads: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    /// The name if exactly one solicitation is answered.
    pub fn as_single(&self) -> Option<&Name> {
        if self.answers.len() == 1 {
            self.answers.iter().next()
        } else {
            None
        }
    }

    pub fn is_single(&self, name: &Name) -> bool {
        self.as_single() == Some(name)
    }
}

impl From<&str> for Utterance {
    fn from(s: &str) -> Self {
        Utterance::single(s)
    }
}

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Episode {
    pub turns: Vec<Utterance>,
}

impl Episode {
    pub fn new(turns: Vec<Utterance>) -> Self {
        Episode { turns }
    }

    /// Convenience for single-answer turns.
    pub fn singles(names: &[&str]) -> Self {
        Episode { turns: names.iter().map(|n| Utterance::single(n)).collect() }
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn answered(&self) -> BTreeSet<Name> {
        self.turns.iter().flat_map(|t| t.answers().iter().cloned()).collect()
    }

    /// First name answered twice, if any.
    pub fn duplicate(&self) -> Option<Name> {
        let mut seen = BTreeSet::new();
        for t in &self.turns {
            for n in t.answers() {
                if !seen.insert(n.clone()) {
                    return Some(n.clone());
                }
            }
        }
        None
    }

    pub fn without_payloads(&self) -> Self {
        Episode { turns: self.turns.iter().map(Utterance::without_payloads).collect() }
    }
}
