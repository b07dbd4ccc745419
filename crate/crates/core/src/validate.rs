//! Context-sensitive restrictions that the grammar alone does not enforce.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Dialog, Mnemonic, Name, Path};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// Atoms-only mnemonics take bare, unarrowed atoms.
    R1,
    /// PFA1 and SPE accept sub-dialogs in two shapes only.
    R2,
    /// Arrow targets must exist and be W.
    R3,
    /// Duplicate solicitation names.
    R4,
    /// Union placement.
    R5,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R4 => "R4",
            RuleId::R5 => "R5",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: RuleId,
    pub path: Path,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.rule, self.path, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Legal but suspicious constructs, e.g. `~ | d`. Do not affect `ok`.
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate(expr: &Dialog) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut ancestors = Vec::new();
    walk(expr, &Path::root(), &mut ancestors, None, &mut report);
    names(expr, &Path::root(), &mut report);
    report
}

fn push(report: &mut ValidationReport, rule: RuleId, path: &Path, message: String) {
    report.violations.push(Violation { rule, path: path.clone(), message });
}

// `ancestors` holds the mnemonics of enclosing nodes, innermost last; unions are transparent.
fn walk(
    d: &Dialog,
    path: &Path,
    ancestors: &mut Vec<Mnemonic>,
    parent: Option<Mnemonic>,
    report: &mut ValidationReport,
) {
    let arrows = d.arrows();
    if arrows > 0 {
        check_arrow_target(arrows, path, ancestors, report);
    }
    match d {
        Dialog::Empty | Dialog::Atom { .. } => {}
        Dialog::Union(a, b) => {
            if parent.is_some() {
                push(report, RuleId::R5, path, "union may only join top-level alternatives".into());
            }
            for (i, side) in [a, b].into_iter().enumerate() {
                if side.is_empty() {
                    report.warnings.push(Violation {
                        rule: RuleId::R5,
                        path: path.child(i),
                        message: "union operand is the empty dialog".into(),
                    });
                }
                walk(side, &path.child(i), ancestors, parent, report);
            }
        }
        Dialog::Node { mnemonic, children, .. } => {
            let m = mnemonic.normalized();
            if m.is_atoms_only() {
                for (i, c) in children.iter().enumerate() {
                    match c {
                        Dialog::Atom { arrows: 0, .. } => {}
                        Dialog::Atom { .. } => push(
                            report,
                            RuleId::R1,
                            &path.child(i),
                            format!("arrows are not allowed under {mnemonic}"),
                        ),
                        _ => push(
                            report,
                            RuleId::R1,
                            &path.child(i),
                            format!("{mnemonic} takes solicitations only"),
                        ),
                    }
                }
            }
            if matches!(m, Mnemonic::Pfa1 | Mnemonic::Spe) {
                for (i, c) in children.iter().enumerate() {
                    if c.is_atom() && c.arrows() > 0 {
                        push(
                            report,
                            RuleId::R1,
                            &path.child(i),
                            format!("arrows are not allowed on solicitations under {mnemonic}"),
                        );
                    }
                }
                let subs: Vec<usize> =
                    (0..children.len()).filter(|&i| !children[i].is_atom()).collect();
                let fine = subs.is_empty() || children.len() <= 2 || subs == [0];
                if !fine {
                    push(
                        report,
                        RuleId::R2,
                        path,
                        format!(
                            "{mnemonic} with more than two children allows a sub-dialog only in first position"
                        ),
                    );
                }
            }
            ancestors.push(m);
            for (i, c) in children.iter().enumerate() {
                walk(c, &path.child(i), ancestors, Some(m), report);
            }
            ancestors.pop();
        }
    }
}

fn check_arrow_target(k: u32, path: &Path, ancestors: &[Mnemonic], report: &mut ValidationReport) {
    // parent is ancestors[len-1]; k levels above it is ancestors[len-1-k]
    let len = ancestors.len();
    let k = k as usize;
    if len == 0 {
        push(report, RuleId::R3, path, "arrows on a top-level expression have no target".into());
        return;
    }
    if k > len - 1 {
        push(report, RuleId::R3, path, format!("{k} arrow(s) reach above the root"));
        return;
    }
    let target = ancestors[len - 1 - k];
    if target != Mnemonic::W {
        push(report, RuleId::R3, path, format!("arrow target is {target}, not W"));
    }
}

// Names must be distinct within each union alternative; the two sides of a union may share names.
fn names(d: &Dialog, path: &Path, report: &mut ValidationReport) -> BTreeSet<Name> {
    match d {
        Dialog::Empty => BTreeSet::new(),
        Dialog::Atom { name, .. } => BTreeSet::from([name.clone()]),
        Dialog::Union(a, b) => {
            let mut s = names(a, &path.child(0), report);
            s.extend(names(b, &path.child(1), report));
            s
        }
        Dialog::Node { children, .. } => {
            let mut acc = BTreeSet::new();
            for (i, c) in children.iter().enumerate() {
                let s = names(c, &path.child(i), report);
                for n in &s {
                    if acc.contains(n) {
                        push(report, RuleId::R4, &path.child(i), format!("duplicate solicitation {n}"));
                    }
                }
                acc.extend(s);
            }
            acc
        }
    }
}
