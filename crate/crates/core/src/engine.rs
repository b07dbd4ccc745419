//! Single-step reduction over `(stack, current, pending)` states, covering W and arrows.
//!
//! Dialog constructors are reified as one-hole contexts so states can be compared, hashed and
//! printed. The hole prints as `@`; the bottom constructor prints as `const ~`.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{atom, node, Dialog, Mnemonic, Name};
use crate::simplify::canonical;
use crate::stage::{atom_rules, desugar};
use crate::syntax::{parse_with_hole, SyntaxError, HOLE};
use crate::utterance::{Episode, Utterance};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frame {
    pub mnemonic: Mnemonic,
    /// Arrows of the node this frame was taken from; they fire once the node is finished.
    pub arrows: u32,
    pub left: Vec<Dialog>,
    pub right: Vec<Dialog>,
}

impl Frame {
    fn fill(&self, d: Dialog) -> Dialog {
        let mut ch = Vec::with_capacity(self.left.len() + 1 + self.right.len());
        ch.extend_from_slice(&self.left);
        ch.push(d);
        ch.extend_from_slice(&self.right);
        node(self.mnemonic, ch).with_arrows(self.arrows)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DialogContext {
    /// `const ~`: maps everything to the empty dialog.
    Terminal,
    Hole(Frame),
    /// `outer ∘ inner`, kept right-nested.
    Composed(Box<DialogContext>, Box<DialogContext>),
}

impl DialogContext {
    pub fn hole(mnemonic: Mnemonic, left: Vec<Dialog>, right: Vec<Dialog>) -> Self {
        Self::arrowed_hole(mnemonic, 0, left, right)
    }

    pub fn arrowed_hole(mnemonic: Mnemonic, arrows: u32, left: Vec<Dialog>, right: Vec<Dialog>) -> Self {
        DialogContext::Hole(Frame { mnemonic, arrows, left, right })
    }

    /// `outer ∘ inner`. Anything after `const ~` is still `const ~`.
    pub fn compose(outer: DialogContext, inner: DialogContext) -> DialogContext {
        match outer {
            DialogContext::Terminal => DialogContext::Terminal,
            DialogContext::Composed(a, b) => {
                DialogContext::Composed(a, Box::new(DialogContext::compose(*b, inner)))
            }
            o => DialogContext::Composed(Box::new(o), Box::new(inner)),
        }
    }

    /// Plugs `d` into the hole and canonicalizes each reconstructed level.
    pub fn apply(&self, d: Dialog) -> Dialog {
        match self {
            DialogContext::Terminal => Dialog::Empty,
            DialogContext::Hole(f) => canonical(&f.fill(d)),
            DialogContext::Composed(o, i) => o.apply(i.apply(d)),
        }
    }

    /// The context as an expression with an `@` atom for the hole. None for `const ~`.
    pub fn with_hole(&self) -> Option<Dialog> {
        match self {
            DialogContext::Terminal => None,
            DialogContext::Hole(f) => Some(f.fill(atom(HOLE))),
            DialogContext::Composed(o, i) => {
                let inner = i.with_hole()?;
                Some(plug(&o.with_hole()?, &inner))
            }
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            DialogContext::Terminal => {}
            DialogContext::Hole(f) => {
                for d in f.left.iter().chain(&f.right) {
                    d.collect_names(out);
                }
            }
            DialogContext::Composed(o, i) => {
                o.collect_names(out);
                i.collect_names(out);
            }
        }
    }

    fn collect_groups(&self, out: &mut BTreeSet<BTreeSet<Name>>) {
        match self {
            DialogContext::Terminal => {}
            DialogContext::Hole(f) => {
                for d in f.left.iter().chain(&f.right) {
                    groups(d, out);
                }
            }
            DialogContext::Composed(o, i) => {
                o.collect_groups(out);
                i.collect_groups(out);
            }
        }
    }
}

// Replaces the `@` atom in `outer` with `inner`, without simplifying.
fn plug(outer: &Dialog, inner: &Dialog) -> Dialog {
    match outer {
        Dialog::Atom { name, .. } if name.as_str() == HOLE => inner.clone(),
        Dialog::Node { mnemonic, arrows, children } => Dialog::Node {
            mnemonic: *mnemonic,
            arrows: *arrows,
            children: children.iter().map(|c| plug(c, inner)).collect(),
        },
        Dialog::Union(a, b) => crate::expr::union(plug(a, inner), plug(b, inner)),
        other => other.clone(),
    }
}

impl fmt::Display for DialogContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.with_hole() {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("const ~"),
        }
    }
}

impl fmt::Debug for DialogContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn hole_path(d: &Dialog, at: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
    match d {
        Dialog::Atom { name, .. } if name.as_str() == HOLE => found.push(at.clone()),
        Dialog::Node { children, .. } => {
            for (i, c) in children.iter().enumerate() {
                at.push(i);
                hole_path(c, at, found);
                at.pop();
            }
        }
        Dialog::Union(a, b) => {
            for (i, c) in [a, b].into_iter().enumerate() {
                at.push(i);
                hole_path(c, at, found);
                at.pop();
            }
        }
        _ => {}
    }
}

fn context_at(d: &Dialog, path: &[usize]) -> Option<DialogContext> {
    let (&i, rest) = path.split_first()?;
    let Dialog::Node { mnemonic, arrows, children } = d else { return None };
    let frame = DialogContext::arrowed_hole(*mnemonic, *arrows, children[..i].to_vec(), children[i + 1..].to_vec());
    if rest.is_empty() {
        Some(frame)
    } else {
        Some(DialogContext::Composed(Box::new(frame), Box::new(context_at(&children[i], rest)?)))
    }
}

/// Parses `const ~` or an expression containing exactly one `@` below a mnemonic.
pub fn parse_context(src: &str) -> Result<DialogContext, SyntaxError> {
    if src.trim() == "const ~" {
        return Ok(DialogContext::Terminal);
    }
    let d = parse_with_hole(src)?;
    let mut found = Vec::new();
    hole_path(&d, &mut Vec::new(), &mut found);
    let err = |message: &str| SyntaxError { line: 1, column: 1, message: message.into() };
    match found.as_slice() {
        [p] => context_at(&d, p).ok_or_else(|| err("the hole must sit under mnemonics")),
        [] => Err(err("context has no hole")),
        _ => Err(err("context has more than one hole")),
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReductionState {
    /// Top of stack is the last element.
    pub stack: Vec<DialogContext>,
    pub current: Dialog,
    pub pending: VecDeque<Utterance>,
}

impl ReductionState {
    pub fn init(expr: &Dialog) -> Self {
        ReductionState { stack: alloc::vec![DialogContext::Terminal], current: expr.clone(), pending: VecDeque::new() }
    }

    pub fn with_input(expr: &Dialog, input: &[Utterance]) -> Self {
        let mut s = Self::init(expr);
        s.pending.extend(input.iter().cloned());
        s
    }

    /// Stack top first.
    pub fn stack_top_first(&self) -> impl Iterator<Item = &DialogContext> {
        self.stack.iter().rev()
    }

    /// `(nil, ~, nil)`.
    pub fn is_final(&self) -> bool {
        self.stack.is_empty() && self.current.is_empty() && self.pending.is_empty()
    }

    /// Solicitations still mentioned by the current expression or the stack.
    pub fn remaining(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.current.collect_names(&mut out);
        for c in &self.stack {
            c.collect_names(&mut out);
        }
        out
    }

    fn groups(&self, out: &mut BTreeSet<BTreeSet<Name>>) {
        groups(&self.current, out);
        for c in &self.stack {
            c.collect_groups(out);
        }
    }

    fn pop_apply(&self, consumed: bool) -> Option<ReductionState> {
        let mut stack = self.stack.clone();
        let f = stack.pop()?;
        let mut pending = self.pending.clone();
        if consumed {
            pending.pop_front();
        }
        Some(ReductionState { current: f.apply(Dialog::Empty), stack, pending })
    }

    fn replace(&self, current: Dialog, consumed: bool) -> ReductionState {
        let mut pending = self.pending.clone();
        if consumed {
            pending.pop_front();
        }
        ReductionState { stack: self.stack.clone(), current, pending }
    }

    fn push(&self, ctx: DialogContext, current: Dialog) -> ReductionState {
        let mut stack = self.stack.clone();
        stack.push(ctx);
        ReductionState { stack, current, pending: self.pending.clone() }
    }
}

impl fmt::Display for ReductionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.stack_top_first().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] | {} |", self.current)?;
        for u in &self.pending {
            write!(f, " {u}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReductionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Name sets of nodes with at least two solicitation children: the only places a
// multi-name utterance can be consumed.
fn groups(d: &Dialog, out: &mut BTreeSet<BTreeSet<Name>>) {
    match d {
        Dialog::Node { children, .. } => {
            let names: BTreeSet<Name> = children.iter().filter_map(Dialog::atom_name).cloned().collect();
            if names.len() >= 2 {
                out.insert(names);
            }
            for c in children {
                groups(c, out);
            }
        }
        Dialog::Union(a, b) => {
            groups(a, out);
            groups(b, out);
        }
        _ => {}
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleName {
    Empty,
    Atom,
    Arrow,
    UnionL,
    UnionR,
    C,
    W,
    SpePrime,
    I,
    /// An atoms-only mnemonic consumed input and rewrote itself in place.
    InPlace(&'static str),
    /// PFA1 or SPE over sub-dialogs, rewritten before extraction.
    Desugar,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleName::Empty => "EMPTY",
            RuleName::Atom => "ATOM",
            RuleName::Arrow => "ARROW",
            RuleName::UnionL => "UNION-L",
            RuleName::UnionR => "UNION-R",
            RuleName::C => "C",
            RuleName::W => "W",
            RuleName::SpePrime => "SPE'",
            RuleName::I => "I",
            RuleName::InPlace(r) => r,
            RuleName::Desugar => "DESUGAR",
        };
        f.write_str(s)
    }
}

// Nodes that push frames keep their arrows in the frame until they finish. Atoms and
// atoms-only nodes finish in the step that consumes them, so their arrows fire up front.
fn enters(d: &Dialog) -> bool {
    let Dialog::Node { mnemonic, children, .. } = d else { return false };
    !children.is_empty()
        && match mnemonic.normalized() {
            Mnemonic::C | Mnemonic::W | Mnemonic::SpePrime => true,
            Mnemonic::Pfa1 | Mnemonic::Spe => !children.iter().all(Dialog::is_atom),
            _ => false,
        }
}

/// Every state reachable by one rule, tagged with the rule. Empty means stuck or final.
pub fn reduce_one_tagged(s: &ReductionState) -> Vec<(RuleName, ReductionState)> {
    let mut out = Vec::new();
    let k = s.current.arrows();
    if k > 0 && !enters(&s.current) {
        // (f1 :: f2 :: Λ, d^) ⇝ (f2 ∘ f1 :: Λ, d)
        if s.stack.len() >= 2 {
            let mut stack = s.stack.clone();
            let f1 = stack.pop().unwrap();
            let f2 = stack.pop().unwrap();
            stack.push(DialogContext::compose(f2, f1));
            out.push((
                RuleName::Arrow,
                ReductionState { stack, current: s.current.with_arrows(k - 1), pending: s.pending.clone() },
            ));
        }
        return out;
    }
    let front = s.pending.front();
    match &s.current {
        Dialog::Empty => {
            out.extend(s.pop_apply(false).map(|n| (RuleName::Empty, n)));
        }
        Dialog::Atom { name, .. } => {
            if front.is_some_and(|u| u.is_single(name)) {
                out.extend(s.pop_apply(true).map(|n| (RuleName::Atom, n)));
            }
        }
        Dialog::Union(a, b) => {
            out.push((RuleName::UnionL, s.replace((**a).clone(), false)));
            out.push((RuleName::UnionR, s.replace((**b).clone(), false)));
        }
        Dialog::Node { mnemonic, arrows, children } => {
            if children.is_empty() {
                out.extend(s.pop_apply(false).map(|n| (RuleName::Empty, n)));
                return out;
            }
            if let Some(sugar) = desugar(*mnemonic, *arrows, children) {
                out.push((RuleName::Desugar, s.replace(sugar, false)));
                return out;
            }
            let m = mnemonic.normalized();
            match m {
                Mnemonic::C => {
                    let ctx = DialogContext::arrowed_hole(*mnemonic, *arrows, Vec::new(), children[1..].to_vec());
                    out.push((RuleName::C, s.push(ctx, children[0].clone())));
                }
                Mnemonic::W | Mnemonic::SpePrime => {
                    let rule = if m == Mnemonic::W { RuleName::W } else { RuleName::SpePrime };
                    for i in 0..children.len() {
                        let (l, r) = (children[..i].to_vec(), children[i + 1..].to_vec());
                        let ctx = DialogContext::arrowed_hole(*mnemonic, *arrows, l, r);
                        out.push((rule, s.push(ctx, children[i].clone())));
                    }
                }
                _ => {
                    let Some(u) = front else { return out };
                    let Some(names) = children.iter().map(Dialog::atom_name).collect::<Option<Vec<_>>>() else {
                        return out;
                    };
                    if m == Mnemonic::I {
                        let all: BTreeSet<Name> = names.iter().map(|n| (*n).clone()).collect();
                        if *u.answers() == all {
                            out.extend(s.pop_apply(true).map(|n| (RuleName::I, n)));
                        }
                        return out;
                    }
                    for (rule, d) in atom_rules(m, &names, u.answers()) {
                        out.push((RuleName::InPlace(rule), s.replace(canonical(&d), true)));
                    }
                }
            }
        }
    }
    out
}

pub fn reduce_one(s: &ReductionState) -> Vec<ReductionState> {
    reduce_one_tagged(s).into_iter().map(|(_, n)| n).collect()
}

/// Set of live states.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frontier {
    pub states: BTreeSet<ReductionState>,
}

impl Frontier {
    pub fn init(expr: &Dialog) -> Self {
        Frontier { states: BTreeSet::from([ReductionState::init(expr)]) }
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn remaining(&self) -> BTreeSet<Name> {
        self.states.iter().flat_map(ReductionState::remaining).collect()
    }
}

impl fmt::Debug for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.states).finish()
    }
}

/// Appends `u` to each state and keeps the states that manage to consume it.
pub fn stage_response(f: &Frontier, u: &Utterance) -> Frontier {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in &f.states {
        let mut s = s.clone();
        s.pending.push_back(u.clone());
        queue.push_back(s);
    }
    let target = queue.front().map_or(0, |s| s.pending.len()) - 1;
    while let Some(s) = queue.pop_front() {
        if !seen.insert(s.clone()) {
            continue;
        }
        if s.pending.len() == target {
            out.insert(s);
            continue;
        }
        queue.extend(reduce_one(&s));
    }
    Frontier { states: out }
}

// Input-free closure of one state reaches (nil, ~, nil)?
fn completes(s: &ReductionState) -> bool {
    if !s.pending.is_empty() {
        return false;
    }
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![s.clone()];
    while let Some(s) = stack.pop() {
        if s.is_final() {
            return true;
        }
        if seen.insert(s.clone()) {
            stack.extend(reduce_one(&s));
        }
    }
    false
}

/// How many states of a frontier must finish for it to count as complete.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Completion {
    #[default]
    Any,
    /// Every surviving state.
    All,
}

pub fn is_complete(f: &Frontier) -> bool {
    is_complete_with(f, Completion::Any)
}

pub fn is_complete_with(f: &Frontier, mode: Completion) -> bool {
    match mode {
        Completion::Any => f.states.iter().any(completes),
        Completion::All => !f.is_empty() && f.states.iter().all(completes),
    }
}

/// Frontier after feeding `turns` from the initial state; empty on rejection.
pub fn run_turns(expr: &Dialog, turns: &[Utterance]) -> Frontier {
    let mut f = Frontier::init(expr);
    for t in turns {
        if f.is_empty() {
            break;
        }
        f = stage_response(&f, t);
    }
    f
}

pub fn membership(expr: &Dialog, ep: &Episode) -> bool {
    membership_with(expr, ep, Completion::Any)
}

pub fn membership_with(expr: &Dialog, ep: &Episode, mode: Completion) -> bool {
    is_complete_with(&run_turns(expr, &ep.turns), mode)
}

pub fn is_prefix(expr: &Dialog, turns: &[Utterance]) -> bool {
    !run_turns(expr, turns).is_empty()
}

// Non-empty subsets of `items`, smallest first.
fn subsets(items: &[Name], min: usize) -> Vec<BTreeSet<Name>> {
    let n = items.len();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        if (mask.count_ones() as usize) < min {
            continue;
        }
        out.push((0..n).filter(|i| mask >> i & 1 == 1).map(|i| items[i].clone()).collect());
    }
    out
}

/// Utterances worth probing: every remaining name alone, plus every subset of two or more
/// names drawn from one node's solicitation children. Ordered by size, then by names.
pub fn probes(f: &Frontier, universe: &BTreeSet<Name>) -> Vec<Utterance> {
    let remaining: BTreeSet<Name> = f.remaining().intersection(universe).cloned().collect();
    let mut sets: BTreeSet<(usize, BTreeSet<Name>)> =
        remaining.iter().map(|n| (1, BTreeSet::from([n.clone()]))).collect();
    let mut gs = BTreeSet::new();
    for s in &f.states {
        s.groups(&mut gs);
    }
    for g in gs {
        let g: Vec<Name> = g.intersection(&remaining).cloned().collect();
        for s in subsets(&g, 2) {
            sets.insert((s.len(), s));
        }
    }
    sets.into_iter().filter_map(|(_, s)| Utterance::from_set(s)).collect()
}

/// Every utterance the frontier can consume, with the frontier it leads to.
pub fn successors(f: &Frontier, universe: &BTreeSet<Name>) -> Vec<(Utterance, Frontier)> {
    probes(f, universe)
        .into_iter()
        .filter_map(|u| {
            let next = stage_response(f, &u);
            (!next.is_empty()).then_some((u, next))
        })
        .collect()
}

pub fn candidates(f: &Frontier, universe: &BTreeSet<Name>) -> Vec<Utterance> {
    successors(f, universe).into_iter().map(|(u, _)| u).collect()
}

/// One configuration of a reduction path, with the rule that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Option<RuleName>,
    pub state: ReductionState,
}

/// A shortest reduction from the initial state to `(nil, ~, nil)` consuming `ep`, if any.
pub fn trace(expr: &Dialog, ep: &Episode) -> Option<Vec<TraceStep>> {
    let start = ReductionState::with_input(expr, &ep.turns);
    let mut parent: BTreeMap<ReductionState, Option<(RuleName, ReductionState)>> = BTreeMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if s.is_final() {
            let mut path = Vec::new();
            let mut cur = Some(s);
            while let Some(c) = cur {
                let link = parent[&c].clone();
                let rule = link.as_ref().map(|(r, _)| *r);
                path.push(TraceStep { rule, state: c });
                cur = link.map(|(_, p)| p);
            }
            path.reverse();
            return Some(path);
        }
        for (rule, n) in reduce_one_tagged(&s) {
            if !parent.contains_key(&n) {
                parent.insert(n.clone(), Some((rule, s.clone())));
                queue.push_back(n);
            }
        }
    }
    None
}
