//! Compresses an episode set into a union of arrow-free, W-free expressions.
//!
//! Every candidate's extension is a subset of the target, so any union of candidates is sound.
//! Greedy selection picks the candidate covering the most uncovered episodes while that gains
//! at least two; whatever remains is covered one episode at a time by `C` over the turns.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec::Vec;

use crate::episodes::{enumerate_capped, EnumError, EnumeratedSpec, DEFAULT_CAP};
use crate::expr::{node, Dialog, Mnemonic, Name};
use crate::simplify::canonical;
use crate::utterance::{Episode, Utterance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinerConfig {
    /// 1 = mnemonics over solicitations only; 2 = one level of sub-dialogs; and so on.
    pub depth: usize,
    pub cap: usize,
    /// Upper bound on child combinations tried per ordered partition.
    pub combos: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig { depth: 2, cap: DEFAULT_CAP, combos: 32 }
    }
}

type Ext = Rc<BTreeSet<Episode>>;

#[derive(Clone)]
struct Candidate {
    expr: Dialog,
    ext: Ext,
}

const ORDER_FREE: [Mnemonic; 6] =
    [Mnemonic::I, Mnemonic::Pe, Mnemonic::PeStar, Mnemonic::Spe, Mnemonic::SpeStar, Mnemonic::SpePrime];
const ORDERED: [Mnemonic; 5] = [Mnemonic::C, Mnemonic::Pfa1, Mnemonic::Pfa1Star, Mnemonic::PfaN, Mnemonic::PfaNStar];

/// The single-episode expression: `C` over the turns, multi-name turns as `I`.
pub fn episode_expr(e: &Episode) -> Dialog {
    let turns = e
        .turns
        .iter()
        .map(|t| match t.as_single() {
            Some(n) => Dialog::Atom { name: n.clone(), arrows: 0 },
            None => node(Mnemonic::I, t.answers().iter().map(|n| Dialog::Atom { name: n.clone(), arrows: 0 }).collect()),
        })
        .collect();
    canonical(&node(Mnemonic::C, turns))
}

fn flat(e: &Episode) -> Vec<Name> {
    e.turns.iter().flat_map(|t| t.answers().iter().cloned()).collect()
}

fn permutations(items: &[Name]) -> Vec<Vec<Name>> {
    if items.len() <= 1 {
        return alloc::vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

fn single(n: &Name) -> Utterance {
    Utterance::from_set(BTreeSet::from([n.clone()])).unwrap()
}

fn group(ns: &[Name]) -> Utterance {
    Utterance::from_set(ns.iter().cloned().collect()).unwrap()
}

// One episode every extension of `m` over `order` contains; a cheap filter before enumerating.
fn witness(m: Mnemonic, order: &[Name]) -> Episode {
    let singles = Episode::new(order.iter().map(single).collect());
    match m {
        Mnemonic::Pfa1 | Mnemonic::PfaN if order.len() > 1 => {
            Episode::new(alloc::vec![single(&order[0]), group(&order[1..])])
        }
        _ => singles,
    }
}

// names, target episodes, depth
type MemoKey = (BTreeSet<Name>, BTreeSet<Episode>, usize);

struct Miner {
    cfg: MinerConfig,
    exts: BTreeMap<Dialog, Ext>,
    memo: BTreeMap<MemoKey, Rc<Vec<Candidate>>>,
}

impl Miner {
    fn ext(&mut self, d: &Dialog) -> Result<Ext, EnumError> {
        if let Some(e) = self.exts.get(d) {
            return Ok(e.clone());
        }
        let e: Ext = Rc::new(enumerate_capped(d, self.cfg.cap)?.episodes().clone());
        self.exts.insert(d.clone(), e.clone());
        Ok(e)
    }

    fn level1(&mut self, names: &[Name], target: &BTreeSet<Episode>) -> Result<Vec<Candidate>, EnumError> {
        let mut out = Vec::new();
        if names.len() == 1 {
            let d = Dialog::Atom { name: names[0].clone(), arrows: 0 };
            let ext = self.ext(&d)?;
            if ext.is_subset(target) {
                out.push(Candidate { expr: d, ext });
            }
            return Ok(out);
        }
        let atoms = |order: &[Name]| order.iter().map(|n| Dialog::Atom { name: n.clone(), arrows: 0 }).collect();
        let mut tries: Vec<Dialog> = ORDER_FREE.iter().map(|m| node(*m, atoms(names))).collect();
        let orders: BTreeSet<Vec<Name>> = if names.len() <= 5 {
            permutations(names).into_iter().collect()
        } else {
            target.iter().map(flat).collect()
        };
        for order in &orders {
            for m in ORDERED {
                if target.contains(&witness(m, order)) {
                    tries.push(node(m, atoms(order)));
                }
            }
        }
        for d in tries {
            let ext = self.ext(&d)?;
            if ext.is_subset(target) {
                out.push(Candidate { expr: d, ext });
            }
        }
        Ok(out)
    }

    fn candidates(
        &mut self,
        names: &BTreeSet<Name>,
        target: &BTreeSet<Episode>,
        depth: usize,
    ) -> Result<Rc<Vec<Candidate>>, EnumError> {
        let key = (names.clone(), target.clone(), depth);
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let list: Vec<Name> = names.iter().cloned().collect();
        let mut out = self.level1(&list, target)?;
        if depth >= 2 && list.len() >= 2 {
            out.extend(self.nested(target, depth)?);
        }
        let mut by_ext: BTreeMap<Ext, Dialog> = BTreeMap::new();
        for c in out {
            let e = by_ext.entry(c.ext).or_insert_with(|| c.expr.clone());
            if (c.expr.size(), &c.expr) < (e.size(), &*e) {
                *e = c.expr;
            }
        }
        let out = Rc::new(by_ext.into_iter().map(|(ext, expr)| Candidate { expr, ext }).collect::<Vec<_>>());
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    // C and SPE' over ordered partitions read off the target's own turn boundaries.
    fn nested(&mut self, target: &BTreeSet<Episode>, depth: usize) -> Result<Vec<Candidate>, EnumError> {
        let mut parts: BTreeMap<Vec<BTreeSet<Name>>, BTreeMap<usize, BTreeSet<Episode>>> = BTreeMap::new();
        for e in target {
            let m = e.turns.len();
            for mask in 1u32..(1u32 << (m.saturating_sub(1))) {
                let mut blocks = Vec::new();
                let mut segs = Vec::new();
                let mut start = 0;
                for i in 0..m {
                    if i == m - 1 || mask >> i & 1 == 1 {
                        let seg = Episode::new(e.turns[start..=i].to_vec());
                        blocks.push(seg.answered());
                        segs.push(seg);
                        start = i + 1;
                    }
                }
                let slot = parts.entry(blocks).or_default();
                for (i, s) in segs.into_iter().enumerate() {
                    slot.entry(i).or_default().insert(s);
                }
            }
        }
        let mut out = Vec::new();
        let keys: Vec<_> = parts.keys().cloned().collect();
        for blocks in &keys {
            let proj: Vec<BTreeSet<Episode>> = (0..blocks.len()).map(|i| parts[blocks][&i].clone()).collect();
            if let Some(c) = self.sequence(Mnemonic::C, blocks, &proj, target, depth)? {
                out.extend(c);
            }
            // SPE' needs every ordering of the blocks; take the first in sorted order as representative
            let mut sorted = blocks.clone();
            sorted.sort();
            if *blocks == sorted && blocks.len() <= 4 {
                let mut spe_proj: Vec<BTreeSet<Episode>> = alloc::vec![BTreeSet::new(); blocks.len()];
                let mut all = true;
                for perm in index_permutations(blocks.len()) {
                    let pb: Vec<_> = perm.iter().map(|&i| blocks[i].clone()).collect();
                    match parts.get(&pb) {
                        Some(p) => {
                            for (slot, &i) in perm.iter().enumerate() {
                                spe_proj[i].extend(p[&slot].iter().cloned());
                            }
                        }
                        None => {
                            all = false;
                            break;
                        }
                    }
                }
                if all {
                    if let Some(c) = self.sequence(Mnemonic::SpePrime, blocks, &spe_proj, target, depth)? {
                        out.extend(c);
                    }
                }
            }
        }
        Ok(out)
    }

    fn sequence(
        &mut self,
        m: Mnemonic,
        blocks: &[BTreeSet<Name>],
        proj: &[BTreeSet<Episode>],
        target: &BTreeSet<Episode>,
        depth: usize,
    ) -> Result<Option<Vec<Candidate>>, EnumError> {
        let k = blocks.len();
        let per = per_block(self.cfg.combos, k);
        let mut options: Vec<Vec<Candidate>> = Vec::with_capacity(k);
        for (b, t) in blocks.iter().zip(proj) {
            let mut opts: Vec<Candidate> = self.candidates(b, t, depth - 1)?.iter().cloned().collect();
            for e in t {
                let d = episode_expr(e);
                opts.push(Candidate { expr: d, ext: Rc::new(BTreeSet::from([e.clone()])) });
            }
            opts.sort_by(|a, b| b.ext.len().cmp(&a.ext.len()).then(a.expr.size().cmp(&b.expr.size())));
            opts.dedup_by(|a, b| a.ext == b.ext);
            opts.truncate(per);
            options.push(opts);
        }
        let mut out = Vec::new();
        let mut pick = alloc::vec![0usize; k];
        loop {
            let children: Vec<&Candidate> = pick.iter().enumerate().map(|(i, &j)| &options[i][j]).collect();
            if let Some(ext) = combine(m, &children, target) {
                let expr = canonical(&node(m, children.iter().map(|c| c.expr.clone()).collect()));
                out.push(Candidate { expr, ext: Rc::new(ext) });
            }
            let mut i = 0;
            loop {
                if i == k {
                    return Ok(Some(out));
                }
                pick[i] += 1;
                if pick[i] < options[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }
}

fn per_block(combos: usize, k: usize) -> usize {
    let mut m = 1usize;
    while (m + 1).checked_pow(k as u32).is_some_and(|p| p <= combos) {
        m += 1;
    }
    m
}

fn index_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in index_permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

// Concatenation product of the children's extensions (over every child order for SPE');
// None as soon as an episode falls outside `target`.
fn combine(m: Mnemonic, children: &[&Candidate], target: &BTreeSet<Episode>) -> Option<BTreeSet<Episode>> {
    let orders = if m == Mnemonic::SpePrime {
        index_permutations(children.len())
    } else {
        alloc::vec![(0..children.len()).collect()]
    };
    let mut out = BTreeSet::new();
    for order in orders {
        let mut acc: Vec<Vec<Utterance>> = alloc::vec![Vec::new()];
        for &i in &order {
            let mut next = Vec::new();
            for prefix in &acc {
                for e in children[i].ext.iter() {
                    let mut t = prefix.clone();
                    t.extend(e.turns.iter().cloned());
                    next.push(t);
                }
            }
            if next.len() > target.len() {
                return None;
            }
            acc = next;
        }
        for turns in acc {
            let e = Episode::new(turns);
            if !target.contains(&e) {
                return None;
            }
            out.insert(e);
        }
    }
    Some(out)
}

pub fn mine(spec: &EnumeratedSpec) -> Result<Vec<Dialog>, EnumError> {
    mine_with(spec, MinerConfig::default())
}

/// Expressions whose union enumerates exactly `spec`. Never more expressions than episodes.
pub fn mine_with(spec: &EnumeratedSpec, cfg: MinerConfig) -> Result<Vec<Dialog>, EnumError> {
    if spec.universe().len() > cfg.cap {
        return Err(EnumError::CapExceeded { names: spec.universe().len(), cap: cfg.cap });
    }
    let mut groups: BTreeMap<BTreeSet<Name>, BTreeSet<Episode>> = BTreeMap::new();
    for e in spec.episodes() {
        groups.entry(e.answered()).or_default().insert(e.clone());
    }
    let mut miner = Miner { cfg, exts: BTreeMap::new(), memo: BTreeMap::new() };
    let mut out = Vec::new();
    for (names, target) in groups {
        let pool = if names.is_empty() {
            Rc::new(Vec::new())
        } else {
            miner.candidates(&names, &target, cfg.depth.max(1))?
        };
        let mut uncovered = target.clone();
        loop {
            let best = pool
                .iter()
                .map(|c| (c.ext.intersection(&uncovered).count(), c))
                .filter(|(gain, _)| *gain >= 2)
                .max_by(|(ga, a), (gb, b)| {
                    ga.cmp(gb).then(b.expr.size().cmp(&a.expr.size())).then(b.expr.cmp(&a.expr))
                });
            let Some((_, c)) = best else { break };
            for e in c.ext.iter() {
                uncovered.remove(e);
            }
            out.push(c.expr.clone());
        }
        out.extend(uncovered.iter().map(episode_expr));
    }
    Ok(out)
}
