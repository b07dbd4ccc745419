//! Exact episode sets and extensional equivalence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::{is_complete, successors, Frontier};
use crate::expr::{Dialog, Name};
use crate::utterance::Episode;

pub const DEFAULT_CAP: usize = 8;

/// A set of episodes plus the names they range over.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct EnumeratedSpec {
    episodes: BTreeSet<Episode>,
    universe: BTreeSet<Name>,
}

impl EnumeratedSpec {
    pub fn new(universe: BTreeSet<Name>) -> Self {
        EnumeratedSpec { episodes: BTreeSet::new(), universe }
    }

    /// Payloads are dropped; the episode's names join the universe.
    pub fn insert(&mut self, e: Episode) -> bool {
        let e = e.without_payloads();
        self.universe.extend(e.answered());
        self.episodes.insert(e)
    }

    pub fn episodes(&self) -> &BTreeSet<Episode> {
        &self.episodes
    }

    pub fn universe(&self) -> &BTreeSet<Name> {
        &self.universe
    }

    pub fn contains(&self, e: &Episode) -> bool {
        self.episodes.contains(&e.without_payloads())
    }

    pub fn size(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn union(&self, other: &EnumeratedSpec) -> EnumeratedSpec {
        EnumeratedSpec {
            episodes: self.episodes.union(&other.episodes).cloned().collect(),
            universe: self.universe.union(&other.universe).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &EnumeratedSpec) -> bool {
        self.episodes.is_subset(&other.episodes)
    }

    /// Episodes in exactly one of the two specs.
    pub fn symmetric_difference<'a>(&'a self, other: &'a EnumeratedSpec) -> impl Iterator<Item = &'a Episode> {
        self.episodes.symmetric_difference(&other.episodes)
    }
}

impl FromIterator<Episode> for EnumeratedSpec {
    fn from_iter<T: IntoIterator<Item = Episode>>(iter: T) -> Self {
        let mut s = EnumeratedSpec::default();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumError {
    CapExceeded { names: usize, cap: usize },
}

impl fmt::Display for EnumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumError::CapExceeded { names, cap } => {
                write!(f, "{names} solicitations exceed the enumeration cap of {cap}")
            }
        }
    }
}

impl core::error::Error for EnumError {}

pub fn enumerate(expr: &Dialog) -> Result<EnumeratedSpec, EnumError> {
    enumerate_capped(expr, DEFAULT_CAP)
}

type Suffixes = Rc<Vec<Episode>>;

pub fn enumerate_capped(expr: &Dialog, cap: usize) -> Result<EnumeratedSpec, EnumError> {
    let universe = expr.solicitation_set();
    if universe.len() > cap {
        return Err(EnumError::CapExceeded { names: universe.len(), cap });
    }
    let mut memo = BTreeMap::new();
    let found = suffixes(&Frontier::init(expr), &universe, &mut memo);
    let mut spec = EnumeratedSpec::new(universe);
    for e in found.iter() {
        spec.insert(e.clone());
    }
    Ok(spec)
}

// All turn sequences that take `f` to completion, memoized on the frontier.
fn suffixes(f: &Frontier, universe: &BTreeSet<Name>, memo: &mut BTreeMap<Frontier, Suffixes>) -> Suffixes {
    if let Some(s) = memo.get(f) {
        return s.clone();
    }
    let mut out = Vec::new();
    if is_complete(f) {
        out.push(Episode::default());
    }
    for (u, next) in successors(f, universe) {
        for rest in suffixes(&next, universe, memo).iter() {
            let mut turns = Vec::with_capacity(rest.len() + 1);
            turns.push(u.clone());
            turns.extend(rest.turns.iter().cloned());
            out.push(Episode::new(turns));
        }
    }
    let out = Rc::new(out);
    memo.insert(f.clone(), out.clone());
    out
}

/// Result of comparing two extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// An episode in exactly one side; `in_left` says which.
    Differ { witness: Episode, in_left: bool },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

pub fn compare(a: &EnumeratedSpec, b: &EnumeratedSpec) -> Equivalence {
    match a.symmetric_difference(b).next() {
        None => Equivalence::Equivalent,
        Some(w) => Equivalence::Differ { witness: w.clone(), in_left: a.contains(w) },
    }
}

pub fn equivalent(a: &Dialog, b: &Dialog) -> Result<Equivalence, EnumError> {
    equivalent_capped(a, b, DEFAULT_CAP)
}

pub fn equivalent_capped(a: &Dialog, b: &Dialog, cap: usize) -> Result<Equivalence, EnumError> {
    Ok(compare(&enumerate_capped(a, cap)?, &enumerate_capped(b, cap)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{episode, expr};

    fn eps(d: &str) -> EnumeratedSpec {
        enumerate(&expr(d)).unwrap()
    }

    fn spec(lines: &[&str]) -> EnumeratedSpec {
        lines.iter().map(|l| episode(l)).collect()
    }

    #[test]
    fn small_counts() {
        assert_eq!(eps("C[a,b,c]").size(), 1);
        assert_eq!(eps("SPE'[a,b,c]").size(), 6);
        assert_eq!(eps("PE*[a,b,c]").size(), 13);
        assert_eq!(eps("I[a,b,c]").size(), 1);
        assert_eq!(eps("a").size(), 1);
        assert_eq!(eps("~").episodes().iter().collect::<Vec<_>>(), [&Episode::default()]);
    }

    #[test]
    fn flight() {
        assert_eq!(
            eps("C[departure-time, PE*[from,to], seat]"),
            spec(&[
                "<departure-time {from, to} seat>",
                "<departure-time from to seat>",
                "<departure-time to from seat>",
            ])
        );
    }

    #[test]
    fn cap_refuses() {
        let d = expr("SPE'[a,b,c,d,e]");
        assert_eq!(enumerate_capped(&d, 4), Err(EnumError::CapExceeded { names: 5, cap: 4 }));
        assert_eq!(enumerate_capped(&d, 5).unwrap().size(), 120);
    }

    #[test]
    fn equivalence_with_witness() {
        assert!(equivalent(&expr("PE'[a,b]"), &expr("PE*[a,b]")).unwrap().holds());
        match equivalent(&expr("C[a,b]"), &expr("C[b,a]")).unwrap() {
            Equivalence::Differ { witness, in_left } => {
                assert_eq!(witness, episode("<a b>"));
                assert!(in_left);
            }
            Equivalence::Equivalent => panic!("C is ordered"),
        }
    }

    #[test]
    fn spec_ops() {
        let a = spec(&["<size {blend, type-of-milk}>"]);
        let b = spec(&["<{size, blend} type-of-milk>"]);
        let c = spec(&["<size blend type-of-milk>"]);
        let all = a.union(&b).union(&c);
        assert_eq!(all.size(), 3);
        assert!(all.contains(&episode("<size blend type-of-milk>")));
        assert!(!all.contains(&episode("<blend size type-of-milk>")));
        assert!(a.is_subset(&all));
        assert_eq!(all.universe().len(), 3);
    }

    #[test]
    fn payloads_do_not_split_episodes() {
        let mut s = EnumeratedSpec::default();
        assert!(s.insert(episode("<a=1 b>")));
        assert!(!s.insert(episode("<a b=2>")));
        assert!(s.contains(&episode("<a=9 b>")));
    }
}
