//! Simplification rewrite rules and canonical forms.
//!
//! Two rules are guarded so that rewriting never moves an arrow's landing point:
//! FLATTEN fires only on an arrow-free inner C, and ATOM-1 only when nothing strictly
//! below the surviving child carries arrows. When a wrapper with `j` arrows collapses onto
//! a child with `k` arrows the child ends up with `merge_arrows(j, k)`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Dialog, Mnemonic, Path};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RewriteRule {
    Empty1,
    Empty2,
    Empty3,
    Empty4,
    Atom1,
    Atom2,
    Flatten,
}

impl RewriteRule {
    pub fn id(self) -> &'static str {
        match self {
            RewriteRule::Empty1 => "EMPTY-1",
            RewriteRule::Empty2 => "EMPTY-2",
            RewriteRule::Empty3 => "EMPTY-3",
            RewriteRule::Empty4 => "EMPTY-4",
            RewriteRule::Atom1 => "ATOM-1",
            RewriteRule::Atom2 => "ATOM-2",
            RewriteRule::Flatten => "FLATTEN",
        }
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One rewrite. `path` names the rewritten node, except for EMPTY-2 where it names the removed `~`
/// and FLATTEN where it names the inner C being spliced. `before`/`after` are whole expressions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RewriteStep {
    pub rule: RewriteRule,
    pub path: Path,
    pub before: Dialog,
    pub after: Dialog,
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} => {}", self.rule, self.path, self.before, self.after)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteTrace {
    pub start: Dialog,
    pub steps: Vec<RewriteStep>,
    pub result: Dialog,
}

/// Arrows left on a child after its single-child wrapper collapses.
pub fn merge_arrows(outer: u32, inner: u32) -> u32 {
    if inner == 0 {
        outer
    } else {
        outer + inner - 1
    }
}

fn collapse_onto(child: &Dialog, outer: u32) -> Option<Dialog> {
    if outer > 0 && !child.can_carry_arrows() {
        return None;
    }
    Some(child.with_arrows(merge_arrows(outer, child.arrows())))
}

fn removes_empty(m: Mnemonic) -> bool {
    m.accepts_subdialogs()
}

// Local rewrites at the root of `d`, in rule order. The usize is the child index the rule
// targets (EMPTY-2, FLATTEN), if any.
fn local(d: &Dialog) -> Vec<(RewriteRule, Option<usize>, Dialog)> {
    let mut out = Vec::new();
    match d {
        Dialog::Node { mnemonic, arrows, children } => {
            let m = mnemonic.normalized();
            // an arrowed node that has finished still owes its arrows
            if children.is_empty() && *arrows == 0 {
                out.push((RewriteRule::Empty1, None, Dialog::Empty));
            }
            if removes_empty(m) {
                for (i, c) in children.iter().enumerate() {
                    if c.is_empty() {
                        let mut ch = children.clone();
                        ch.remove(i);
                        out.push((
                            RewriteRule::Empty2,
                            Some(i),
                            Dialog::Node { mnemonic: *mnemonic, arrows: *arrows, children: ch },
                        ));
                    }
                }
            }
            if children.len() == 1 {
                let child = &children[0];
                if matches!(m, Mnemonic::C | Mnemonic::SpePrime) {
                    if !child.has_arrows_below() {
                        if let Some(r) = collapse_onto(child, *arrows) {
                            out.push((RewriteRule::Atom1, None, r));
                        }
                    }
                } else if child.is_atom() {
                    if let Some(r) = collapse_onto(child, *arrows) {
                        out.push((RewriteRule::Atom2, None, r));
                    }
                }
            }
            // literal C on both sides: flattening into or out of PFA1' would change the spelling
            if *mnemonic == Mnemonic::C {
                for (i, c) in children.iter().enumerate() {
                    if let Dialog::Node { mnemonic: im, arrows: 0, children: inner } = c {
                        if *im == Mnemonic::C && inner.iter().all(Dialog::is_arrow_free) {
                            let mut ch = Vec::with_capacity(children.len() + inner.len());
                            ch.extend_from_slice(&children[..i]);
                            ch.extend_from_slice(inner);
                            ch.extend_from_slice(&children[i + 1..]);
                            out.push((
                                RewriteRule::Flatten,
                                Some(i),
                                Dialog::Node { mnemonic: *mnemonic, arrows: *arrows, children: ch },
                            ));
                        }
                    }
                }
            }
        }
        Dialog::Union(a, b) => {
            // `~` is the finished dialog, so dropping it is only sound when the other side
            // may also stop right away.
            if a.is_empty() && b.is_nullable() && b.is_arrow_free() {
                out.push((RewriteRule::Empty3, None, (**b).clone()));
            }
            if b.is_empty() && a.is_nullable() && a.is_arrow_free() {
                out.push((RewriteRule::Empty4, None, (**a).clone()));
            }
        }
        _ => {}
    }
    out
}

fn subterms(d: &Dialog) -> Vec<&Dialog> {
    match d {
        Dialog::Node { children, .. } => children.iter().collect(),
        Dialog::Union(a, b) => alloc::vec![&**a, &**b],
        _ => Vec::new(),
    }
}

fn step_path(at: &Path, target: Option<usize>) -> Path {
    match target {
        Some(i) => at.child(i),
        None => at.clone(),
    }
}

fn first_step(whole: &Dialog, d: &Dialog, at: &Path) -> Option<RewriteStep> {
    for (i, c) in subterms(d).into_iter().enumerate() {
        if let Some(s) = first_step(whole, c, &at.child(i)) {
            return Some(s);
        }
    }
    let (rule, target, replacement) = local(d).into_iter().next()?;
    Some(RewriteStep {
        rule,
        path: step_path(at, target),
        before: whole.clone(),
        after: whole.replace_at(&at.0, replacement),
    })
}

/// Leftmost-innermost applicable step.
pub fn simplify_step(expr: &Dialog) -> Option<RewriteStep> {
    first_step(expr, expr, &Path::root())
}

/// Every applicable (rule, path) pair.
pub fn all_steps(expr: &Dialog) -> Vec<RewriteStep> {
    let mut out = Vec::new();
    collect(expr, expr, &Path::root(), &mut out);
    out
}

fn collect(whole: &Dialog, d: &Dialog, at: &Path, out: &mut Vec<RewriteStep>) {
    for (rule, target, replacement) in local(d) {
        out.push(RewriteStep {
            rule,
            path: step_path(at, target),
            before: whole.clone(),
            after: whole.replace_at(&at.0, replacement),
        });
    }
    for (i, c) in subterms(d).into_iter().enumerate() {
        collect(whole, c, &at.child(i), out);
    }
}

pub fn canonicalize(expr: &Dialog) -> RewriteTrace {
    let mut steps = Vec::new();
    let mut cur = expr.clone();
    while let Some(s) = simplify_step(&cur) {
        cur = s.after.clone();
        steps.push(s);
    }
    RewriteTrace { start: expr.clone(), steps, result: cur }
}

/// Canonical form without recording a trace. Agrees with `canonicalize(..).result`.
pub fn canonical(expr: &Dialog) -> Dialog {
    let mut d = match expr {
        Dialog::Node { mnemonic, arrows, children } => Dialog::Node {
            mnemonic: *mnemonic,
            arrows: *arrows,
            children: children.iter().map(canonical).collect(),
        },
        Dialog::Union(a, b) => crate::expr::union(canonical(a), canonical(b)),
        other => return other.clone(),
    };
    // Children are canonical; root rewrites only ever expose canonical subterms.
    while let Some((_, _, next)) = local(&d).into_iter().next() {
        d = next;
    }
    d
}

pub fn is_canonical(expr: &Dialog) -> bool {
    simplify_step(expr).is_none()
}

/// Every normal form reachable by some rewrite order. Exponential; for testing small trees.
pub fn normal_forms(expr: &Dialog) -> BTreeSet<Dialog> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![expr.clone()];
    while let Some(d) = stack.pop() {
        if !seen.insert(d.clone()) {
            continue;
        }
        let steps = all_steps(&d);
        if steps.is_empty() {
            out.insert(d);
        } else {
            stack.extend(steps.into_iter().map(|s| s.after));
        }
    }
    out
}
