//! Random expressions for property tests.

use std::collections::BTreeSet;

use proptest::prelude::*;

use dialog_core::{enumerate, node, parse_expr, union, validate, Dialog, Episode, Mnemonic, Name, ReductionState, Utterance};

#[derive(Clone, Debug)]
pub enum Shape {
    Atom,
    Empty,
    Node(Mnemonic, Vec<Shape>),
}

#[derive(Clone, Copy)]
pub struct Knobs {
    pub w: bool,
    pub arrows: bool,
    pub empty: bool,
    pub max_atoms: usize,
}

pub fn atoms_only() -> impl Strategy<Value = Mnemonic> {
    prop::sample::select(Mnemonic::ALL.iter().copied().filter(|m| m.is_atoms_only()).collect::<Vec<_>>())
}

pub fn with_subdialogs(w: bool) -> impl Strategy<Value = Mnemonic> {
    let mut ms = vec![Mnemonic::C, Mnemonic::C, Mnemonic::SpePrime, Mnemonic::SpePrime, Mnemonic::Pfa1Prime];
    ms.extend([Mnemonic::Pfa1, Mnemonic::Spe]);
    if w {
        ms.extend([Mnemonic::W, Mnemonic::W, Mnemonic::W]);
    }
    prop::sample::select(ms)
}

pub fn shape(k: Knobs) -> impl Strategy<Value = Shape> {
    let leaf = if k.empty {
        prop_oneof![8 => Just(Shape::Atom), 1 => Just(Shape::Empty)].boxed()
    } else {
        Just(Shape::Atom).boxed()
    };
    leaf.prop_recursive(3, 10, 3, move |inner| {
        prop_oneof![
            (atoms_only(), 1..=3usize).prop_map(|(m, n)| Shape::Node(m, vec![Shape::Atom; n])),
            (with_subdialogs(k.w), prop::collection::vec(inner, 1..=3)).prop_map(|(m, c)| Shape::Node(m, c)),
        ]
    })
}

// Names q1.. in left-to-right order; arrows only where a W sits the right distance up.
pub fn build(s: &Shape, anc: &mut Vec<Mnemonic>, next: &mut usize, picks: &mut impl Iterator<Item = u8>) -> Dialog {
    let arrows = |anc: &[Mnemonic], picks: &mut dyn Iterator<Item = u8>| -> u32 {
        let p = picks.next().unwrap_or(0);
        let len = anc.len();
        let ks: Vec<usize> = (1..len).filter(|&k| anc[len - 1 - k] == Mnemonic::W).collect();
        if p == 0 || ks.is_empty() {
            0
        } else {
            ks[(p as usize - 1) % ks.len()] as u32
        }
    };
    match s {
        Shape::Empty => Dialog::Empty,
        Shape::Atom => {
            *next += 1;
            let a = arrows(anc, picks);
            Dialog::Atom { name: Name::new(&format!("q{next}")), arrows: a }
        }
        Shape::Node(m, children) => {
            let a = arrows(anc, picks);
            anc.push(*m);
            let ch = children.iter().map(|c| build(c, anc, next, picks)).collect();
            anc.pop();
            node(*m, ch).with_arrows(a)
        }
    }
}

pub fn tree(k: Knobs) -> impl Strategy<Value = Dialog> {
    (shape(k), prop::collection::vec(0u8..4, 16))
        .prop_map(move |(s, picks)| {
            let mut it = picks.into_iter().map(move |p| if k.arrows { p } else { 0 });
            build(&s, &mut Vec::new(), &mut 0, &mut it)
        })
        .prop_filter("valid and small", move |d| {
            d.atom_count() <= k.max_atoms && validate(d).ok()
        })
}

pub fn valid_expr(k: Knobs) -> impl Strategy<Value = Dialog> {
    prop_oneof![
        4 => tree(k),
        1 => (tree(k), tree(k)).prop_map(|(a, b)| union(a, b)).prop_filter("valid", |d| validate(d).ok()),
    ]
}

pub const FULL: Knobs = Knobs { w: true, arrows: true, empty: true, max_atoms: 5 };
pub const PLAIN: Knobs = Knobs { w: false, arrows: false, empty: false, max_atoms: 5 };

pub fn names(d: &Dialog) -> Vec<String> {
    d.solicitation_set().iter().map(|n| n.to_string()).collect()
}

pub fn pe_star(names: &[String]) -> Dialog {
    parse_expr(&format!("PE*[{}]", names.join(", "))).unwrap()
}

// Every way to answer each name exactly once, plus their proper prefixes.
pub fn candidate_episodes(d: &Dialog) -> BTreeSet<Episode> {
    let ns = names(d);
    let mut out = BTreeSet::new();
    out.insert(Episode::new(vec![]));
    if ns.is_empty() {
        return out;
    }
    for e in enumerate(&pe_star(&ns)).unwrap().episodes() {
        for k in 1..=e.turns.len() {
            out.insert(Episode::new(e.turns[..k].to_vec()));
        }
    }
    out
}

pub fn all_utterances(d: &Dialog) -> Vec<Utterance> {
    let ns: Vec<Name> = d.solicitation_set().into_iter().collect();
    (1u32..(1 << ns.len()))
        .filter_map(|mask| {
            Utterance::from_set((0..ns.len()).filter(|i| mask >> i & 1 == 1).map(|i| ns[i].clone()).collect())
        })
        .collect()
}

pub fn state_arrows(s: &ReductionState) -> u32 {
    s.current.total_arrows() + s.stack.iter().filter_map(|c| c.with_hole()).map(|d| d.total_arrows()).sum::<u32>()
}

pub fn node_count(d: &Dialog) -> usize {
    match d {
        Dialog::Node { children, .. } => 1 + children.iter().map(node_count).sum::<usize>(),
        Dialog::Union(a, b) => node_count(a) + node_count(b),
        _ => 0,
    }
}
