//! Two-step staging for arrow-free, W-free expressions: stage one utterance, then canonicalize.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{node, union, Dialog, Mnemonic, Name, Path};
use crate::simplify::{canonical, canonicalize, RewriteTrace};
use crate::utterance::{Episode, Utterance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectKind {
    /// Nothing is left to answer.
    Finished,
    /// The utterance names solicitations the expression does not contain.
    Unknown,
    /// The names exist but the structure does not accept them now.
    Refused,
    /// Arrows or W; use the arrow engine.
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub kind: RejectKind,
    /// Node that refused. Root for `Finished`, `Unknown` and `Unsupported`.
    pub path: Path,
    pub mnemonic: Option<Mnemonic>,
    /// The offending names: unknown ones for `Unknown`, otherwise the whole utterance.
    pub names: BTreeSet<Name>,
    pub message: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.message, self.path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StagingOutcome {
    Advanced { next: Dialog, trace: RewriteTrace },
    Rejected(Rejection),
}

impl StagingOutcome {
    pub fn next(&self) -> Option<&Dialog> {
        match self {
            StagingOutcome::Advanced { next, .. } => Some(next),
            StagingOutcome::Rejected(_) => None,
        }
    }
}

/// PFA1 and SPE over sub-dialogs, rewritten into mnemonics that can hold them.
/// `PFA1[d1, d2]` is `C[d1, d2]`, `SPE[d1, d2]` is `SPE'[d1, d2]`, and with a leading
/// sub-dialog followed by solicitations both become `C[d, I[x2, ..]]`.
///
/// Children are judged by their canonical form: name-free ones are dropped and
/// single-solicitation wrappers count as atoms, so simplification never moves a node
/// from one shape to the other. A node that turns out to be atoms-only comes back in
/// that form.
pub fn desugar(mnemonic: Mnemonic, arrows: u32, children: &[Dialog]) -> Option<Dialog> {
    let m = mnemonic.normalized();
    if !matches!(m, Mnemonic::Pfa1 | Mnemonic::Spe) || children.iter().all(Dialog::is_atom) {
        return None;
    }
    let cs: Vec<Dialog> = children.iter().map(canonical).filter(|c| !c.is_empty()).collect();
    let d = if cs.iter().all(Dialog::is_atom) {
        node(mnemonic, cs)
    } else if cs.len() <= 2 {
        let to = if m == Mnemonic::Pfa1 { Mnemonic::C } else { Mnemonic::SpePrime };
        node(to, cs)
    } else {
        let rest = cs[1..].to_vec();
        node(Mnemonic::C, alloc::vec![cs[0].clone(), node(Mnemonic::I, rest)])
    };
    Some(d.with_arrows(arrows))
}

fn atom_names(children: &[Dialog]) -> Option<Vec<&Name>> {
    children.iter().map(Dialog::atom_name).collect()
}

fn atoms(m: Mnemonic, names: &[&Name]) -> Dialog {
    node(m, names.iter().map(|n| Dialog::Atom { name: (*n).clone(), arrows: 0 }).collect())
}

/// Results of the atoms-only rules on `M[x*]` for the answered set `u`, tagged by rule.
/// Shared with the arrow engine, whose in-place rules are the same patterns.
pub(crate) fn atom_rules(m: Mnemonic, names: &[&Name], u: &BTreeSet<Name>) -> Vec<(&'static str, Dialog)> {
    let mut out = Vec::new();
    if u.is_empty() {
        return out;
    }
    let all: BTreeSet<Name> = names.iter().map(|n| (*n).clone()).collect();
    let single = if u.len() == 1 { u.iter().next() } else { None };
    let rest = |drop: &BTreeSet<Name>| -> Vec<&Name> {
        names.iter().copied().filter(|n| !drop.contains(*n)).collect()
    };
    match m.normalized() {
        Mnemonic::I => {
            if *u == all {
                out.push(("I", Dialog::Empty));
            }
        }
        Mnemonic::Pfa1 => {
            if single.is_some() && names.first().copied() == single {
                out.push(("PFA1", atoms(Mnemonic::I, &names[1..])));
            }
        }
        Mnemonic::Pfa1Star => {
            if single.is_some() && names.first().copied() == single {
                out.push(("PFA1*-1", atoms(Mnemonic::Pfa1Star, &names[1..])));
            }
            if *u == all {
                out.push(("PFA1*-2", Dialog::Empty));
            }
        }
        Mnemonic::PfaN | Mnemonic::PfaNStar => {
            let j = u.len();
            let prefix: BTreeSet<Name> = names.iter().take(j).map(|n| (*n).clone()).collect();
            if j <= names.len() && prefix == *u {
                if m.normalized() == Mnemonic::PfaN {
                    out.push(("PFAn", atoms(Mnemonic::I, &names[j..])));
                } else {
                    out.push(("PFAn*", atoms(Mnemonic::PfaNStar, &names[j..])));
                }
            }
        }
        Mnemonic::Spe => {
            if let Some(x) = single.filter(|x| all.contains(*x)) {
                out.push(("SPE", atoms(Mnemonic::I, &rest(&BTreeSet::from([x.clone()])))));
            }
        }
        Mnemonic::SpeStar => {
            if let Some(x) = single.filter(|x| all.contains(*x)) {
                out.push(("SPE*-1", atoms(Mnemonic::SpeStar, &rest(&BTreeSet::from([x.clone()])))));
            }
            if *u == all {
                out.push(("SPE*-2", Dialog::Empty));
            }
        }
        Mnemonic::Pe => {
            // a lone solicitation may be answered; otherwise the subset must be proper
            if u.is_subset(&all) && (u.len() < all.len() || all.len() == 1) {
                out.push(("PE", atoms(Mnemonic::I, &rest(u))));
            }
        }
        Mnemonic::PeStar if u.is_subset(&all) => out.push(("PE*", atoms(Mnemonic::PeStar, &rest(u)))),
        _ => {}
    }
    out
}

#[derive(Clone, Debug)]
struct Refusal {
    path: Path,
    mnemonic: Option<Mnemonic>,
    message: String,
}

fn refuse(path: &Path, mnemonic: Option<Mnemonic>, message: String) -> Refusal {
    Refusal { path: path.clone(), mnemonic, message }
}

// Every rule instance that stages `d` with `u`, before canonicalization.
fn alternatives(d: &Dialog, u: &Utterance, path: &Path) -> Result<Vec<(&'static str, Dialog)>, Refusal> {
    match d {
        Dialog::Empty => Err(refuse(path, None, "the dialog is already complete".into())),
        Dialog::Atom { name, .. } => {
            if u.is_single(name) {
                Ok(alloc::vec![("ATOM", Dialog::Empty)])
            } else {
                Err(refuse(path, None, format!("expected {name}")))
            }
        }
        Dialog::Union(a, b) => {
            let l = stage_raw(a, u, &path.child(0));
            let r = stage_raw(b, u, &path.child(1));
            match (l, r) {
                (Ok(x), Ok(y)) => Ok(alloc::vec![("UNION", union(x, y))]),
                (Ok(x), Err(_)) => Ok(alloc::vec![("UNION-L", x)]),
                (Err(_), Ok(y)) => Ok(alloc::vec![("UNION-R", y)]),
                (Err(e), Err(_)) => Err(e),
            }
        }
        Dialog::Node { mnemonic, arrows, children } => {
            if let Some(sugar) = desugar(*mnemonic, *arrows, children) {
                return alternatives(&sugar, u, path);
            }
            let m = mnemonic.normalized();
            let fail = |msg: String| refuse(path, Some(*mnemonic), msg);
            let out = match m {
                Mnemonic::C => {
                    let first = children.first().ok_or_else(|| fail("no sub-dialogs".into()))?;
                    let staged = stage_raw(first, u, &path.child(0)).map_err(|e| {
                        if e.path == path.child(0) && first.is_atom() {
                            fail(format!("{mnemonic} expects {first} next"))
                        } else {
                            e
                        }
                    })?;
                    let mut ch = children.clone();
                    ch[0] = staged;
                    alloc::vec![("C", Dialog::Node { mnemonic: *mnemonic, arrows: 0, children: ch })]
                }
                Mnemonic::SpePrime => {
                    let mut out = Vec::new();
                    for (i, c) in children.iter().enumerate() {
                        if let Ok(staged) = stage_raw(c, u, &path.child(i)) {
                            let mut rest = children.clone();
                            rest.remove(i);
                            out.push(("SPE'", node(Mnemonic::C, alloc::vec![staged, node(Mnemonic::SpePrime, rest)])));
                        }
                    }
                    out
                }
                Mnemonic::W => return Err(fail("W needs the arrow engine".into())),
                _ => {
                    let names = atom_names(children).ok_or_else(|| fail("malformed children".into()))?;
                    atom_rules(m, &names, u.answers())
                }
            };
            if out.is_empty() {
                Err(fail(format!("{mnemonic} does not accept {u} here")))
            } else {
                Ok(out)
            }
        }
    }
}

fn stage_raw(d: &Dialog, u: &Utterance, path: &Path) -> Result<Dialog, Refusal> {
    let mut alts = alternatives(d, u, path)?;
    Ok(alts.swap_remove(0).1)
}

/// Every applicable rule instance at the outermost level that applies, each with its canonical result.
/// For union-free expressions these all agree.
pub fn stage_all(expr: &Dialog, u: &Utterance) -> Vec<(&'static str, Dialog)> {
    match alternatives(expr, &u.without_payloads(), &Path::root()) {
        Ok(v) => v.into_iter().map(|(r, d)| (r, crate::simplify::canonical(&d))).collect(),
        Err(_) => Vec::new(),
    }
}

pub fn stage(expr: &Dialog, u: &Utterance) -> StagingOutcome {
    let u = u.without_payloads();
    let all_names = u.answers().clone();
    let reject = |kind, path: Path, mnemonic, names, message| {
        StagingOutcome::Rejected(Rejection { kind, path, mnemonic, names, message })
    };
    if u.is_empty() {
        return reject(RejectKind::Refused, Path::root(), None, all_names, "empty utterance".into());
    }
    if expr.total_arrows() > 0 || expr.mentions(Mnemonic::W) {
        return reject(
            RejectKind::Unsupported,
            Path::root(),
            None,
            all_names,
            "arrows and W are staged by the arrow engine".into(),
        );
    }
    if expr.is_empty() {
        return reject(RejectKind::Finished, Path::root(), None, all_names, "the dialog is already complete".into());
    }
    let known = expr.solicitation_set();
    let unknown: BTreeSet<Name> = all_names.difference(&known).cloned().collect();
    if !unknown.is_empty() {
        let list: Vec<&str> = unknown.iter().map(Name::as_str).collect();
        return reject(
            RejectKind::Unknown,
            Path::root(),
            None,
            unknown.clone(),
            format!("unknown solicitation(s): {}", list.join(", ")),
        );
    }
    match stage_raw(expr, &u, &Path::root()) {
        Ok(d) => {
            let trace = canonicalize(&d);
            StagingOutcome::Advanced { next: trace.result.clone(), trace }
        }
        Err(r) => reject(RejectKind::Refused, r.path, r.mnemonic, all_names, r.message),
    }
}

/// True iff every turn advances and the final expression is `~`.
pub fn run_episode(expr: &Dialog, ep: &Episode) -> bool {
    let mut cur = crate::simplify::canonical(expr);
    for t in &ep.turns {
        match stage(&cur, t) {
            StagingOutcome::Advanced { next, .. } => cur = next,
            StagingOutcome::Rejected(_) => return false,
        }
    }
    cur.is_nullable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{episode, expr, parse_utterance};

    fn u(s: &str) -> Utterance {
        parse_utterance(s).unwrap()
    }

    fn next(e: &str, x: &str) -> Option<Dialog> {
        stage(&expr(e), &u(x)).next().cloned()
    }

    #[test]
    fn staging_examples() {
        assert_eq!(
            next("C[departure-time, PE*[from,to], first-class?]", "departure-time"),
            Some(expr("C[PE*[from,to], first-class?]"))
        );
        assert_eq!(next("C[departure-time, PE*[from,to], first-class?]", "from"), None);
        assert_eq!(
            next("C[PE*[size,blend,type-of-milk], rewards-id, receipt?]", "{size, blend, type-of-milk}"),
            Some(expr("C[rewards-id, receipt?]"))
        );
        assert_eq!(next("a", "a"), Some(Dialog::Empty));
        assert_eq!(next("PE[a,b,c]", "{a,b,c}"), None);
        assert_eq!(next("PE[a,b,c]", "{a,c}"), Some(expr("b")));
    }

    #[test]
    fn rejection_kinds() {
        let r = |e: &str, x: &str| match stage(&expr(e), &u(x)) {
            StagingOutcome::Rejected(r) => r,
            _ => panic!("accepted"),
        };
        assert_eq!(r("C[a,b]", "z").kind, RejectKind::Unknown);
        assert_eq!(r("~", "a").kind, RejectKind::Finished);
        let out_of_order = r("C[a,PE*[b,c]]", "b");
        assert_eq!(out_of_order.kind, RejectKind::Refused);
        assert_eq!(out_of_order.mnemonic, Some(Mnemonic::C));
        assert_eq!(r("W[C[a,b],c]", "a").kind, RejectKind::Unsupported);
    }

    #[test]
    fn star_families() {
        assert_eq!(next("SPE*[a,b,c]", "{a,b,c}"), Some(Dialog::Empty));
        assert_eq!(next("SPE*[a,b,c]", "b"), Some(expr("SPE*[a,c]")));
        assert_eq!(next("SPE*[a,b,c]", "{a,b}"), None);
        assert_eq!(next("SPE[a,b,c]", "b"), Some(expr("I[a,c]")));
        assert_eq!(next("PFA1[a,b,c]", "a"), Some(expr("I[b,c]")));
        assert_eq!(next("PFA1[a,b,c]", "b"), None);
        assert_eq!(next("PFA1*[a,b,c]", "{a,b,c}"), Some(Dialog::Empty));
        assert_eq!(next("PFAn[a,b,c]", "{a,b}"), Some(expr("c")));
        assert_eq!(next("PFAn[a,b,c]", "{a,c}"), None);
        assert_eq!(next("PFAn*[a,b,c]", "a"), Some(expr("PFAn*[b,c]")));
        assert_eq!(next("I[a,b]", "a"), None);
        assert_eq!(next("I[a,b]", "{a,b}"), Some(Dialog::Empty));
    }

    #[test]
    fn spe_prime_forces_completion() {
        assert_eq!(next("SPE'[C[a,b], c]", "a"), Some(expr("C[b, c]")));
        assert_eq!(next("SPE'[C[a,b], c, d]", "c"), Some(expr("SPE'[C[a,b], d]")));
    }

    #[test]
    fn unions_stage_concurrently() {
        assert_eq!(next("C[a,b] | C[a,c]", "a"), Some(expr("b | c")));
        assert_eq!(next("C[a,b] | C[b,a]", "b"), Some(expr("a")));
    }

    #[test]
    fn subdialog_forms() {
        assert_eq!(next("PFA1[a, PE*[b,c]]", "a"), Some(expr("PE*[b,c]")));
        assert_eq!(next("PFA1[a, PE*[b,c]]", "b"), None);
        assert_eq!(next("SPE[PE*[a,b], PE*[c,d]]", "c"), Some(expr("C[d, PE*[a,b]]")));
        assert_eq!(next("PFA1[PE*[a,b], c, d]", "a"), Some(expr("C[b, I[c,d]]")));
    }

    #[test]
    fn run_examples() {
        assert!(run_episode(&expr("C[a,b,c]"), &episode("<a b c>")));
        assert!(!run_episode(&expr("C[a,b,c]"), &episode("<b a c>")));
        assert!(run_episode(&expr("PE*[a,b,c]"), &episode("<{a,b} c>")));
        assert!(!run_episode(&expr("C[a,b,c]"), &episode("<a b>")));
        assert!(run_episode(&Dialog::Empty, &episode("<>")));
    }

    #[test]
    fn payloads_are_ignored() {
        assert_eq!(next("C[size, blend]", "size=large"), Some(expr("blend")));
    }
}
