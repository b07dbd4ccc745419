//! Dialog expression trees.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// A solicitation name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mnemonic {
    I,
    C,
    Spe,
    SpeStar,
    SpePrime,
    Pe,
    PeStar,
    PePrime,
    Pfa1,
    Pfa1Star,
    Pfa1Prime,
    PfaN,
    PfaNStar,
    PfaNPrime,
    W,
}

impl Mnemonic {
    pub const ALL: [Mnemonic; 15] = [
        Mnemonic::I,
        Mnemonic::C,
        Mnemonic::Spe,
        Mnemonic::SpeStar,
        Mnemonic::SpePrime,
        Mnemonic::Pe,
        Mnemonic::PeStar,
        Mnemonic::PePrime,
        Mnemonic::Pfa1,
        Mnemonic::Pfa1Star,
        Mnemonic::Pfa1Prime,
        Mnemonic::PfaN,
        Mnemonic::PfaNStar,
        Mnemonic::PfaNPrime,
        Mnemonic::W,
    ];

    pub fn spelling(self) -> &'static str {
        match self {
            Mnemonic::I => "I",
            Mnemonic::C => "C",
            Mnemonic::Spe => "SPE",
            Mnemonic::SpeStar => "SPE*",
            Mnemonic::SpePrime => "SPE'",
            Mnemonic::Pe => "PE",
            Mnemonic::PeStar => "PE*",
            Mnemonic::PePrime => "PE'",
            Mnemonic::Pfa1 => "PFA1",
            Mnemonic::Pfa1Star => "PFA1*",
            Mnemonic::Pfa1Prime => "PFA1'",
            Mnemonic::PfaN => "PFAn",
            Mnemonic::PfaNStar => "PFAn*",
            Mnemonic::PfaNPrime => "PFAn'",
            Mnemonic::W => "W",
        }
    }

    pub fn from_spelling(s: &str) -> Option<Mnemonic> {
        Mnemonic::ALL.iter().copied().find(|m| m.spelling() == s)
    }

    /// Collapses the three redundant spellings onto their representatives.
    pub fn normalized(self) -> Mnemonic {
        match self {
            Mnemonic::Pfa1Prime => Mnemonic::C,
            Mnemonic::PfaNPrime => Mnemonic::PfaNStar,
            Mnemonic::PePrime => Mnemonic::PeStar,
            m => m,
        }
    }

    /// C, SPE', W, PFA1 and SPE may have sub-dialog children.
    /// Classification goes through `normalized`, so PFA1' behaves as C.
    pub fn accepts_subdialogs(self) -> bool {
        matches!(
            self.normalized(),
            Mnemonic::C | Mnemonic::SpePrime | Mnemonic::W | Mnemonic::Pfa1 | Mnemonic::Spe
        )
    }

    pub fn is_atoms_only(self) -> bool {
        !self.accepts_subdialogs()
    }

    /// Does the order of the children change the episode set?
    pub fn is_order_sensitive(self) -> bool {
        matches!(
            self.normalized(),
            Mnemonic::C | Mnemonic::Pfa1 | Mnemonic::Pfa1Star | Mnemonic::PfaN | Mnemonic::PfaNStar
        )
    }
}

impl fmt::Display for Mnemonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.spelling())
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dialog {
    Empty,
    Atom { name: Name, arrows: u32 },
    Node { mnemonic: Mnemonic, arrows: u32, children: Vec<Dialog> },
    Union(Box<Dialog>, Box<Dialog>),
}

impl fmt::Debug for Dialog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Child indices from the root; union sides are 0 (left) and 1 (right).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn child(&self, i: usize) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

pub fn atom(name: &str) -> Dialog {
    Dialog::Atom { name: Name::new(name), arrows: 0 }
}

pub fn node(mnemonic: Mnemonic, children: Vec<Dialog>) -> Dialog {
    Dialog::Node { mnemonic, arrows: 0, children }
}

pub fn union(a: Dialog, b: Dialog) -> Dialog {
    Dialog::Union(Box::new(a), Box::new(b))
}

/// Left fold, matching how `a | b | c` parses. None for an empty list.
pub fn union_all<I: IntoIterator<Item = Dialog>>(items: I) -> Option<Dialog> {
    items.into_iter().reduce(union)
}

impl Dialog {
    /// Arrow count; zero for Empty and Union.
    pub fn arrows(&self) -> u32 {
        match self {
            Dialog::Atom { arrows, .. } | Dialog::Node { arrows, .. } => *arrows,
            _ => 0,
        }
    }

    /// Returns a copy with the arrow count replaced. Empty and Union are returned unchanged.
    pub fn with_arrows(&self, n: u32) -> Dialog {
        match self {
            Dialog::Atom { name, .. } => Dialog::Atom { name: name.clone(), arrows: n },
            Dialog::Node { mnemonic, children, .. } => {
                Dialog::Node { mnemonic: *mnemonic, arrows: n, children: children.clone() }
            }
            other => other.clone(),
        }
    }

    pub fn can_carry_arrows(&self) -> bool {
        matches!(self, Dialog::Atom { .. } | Dialog::Node { .. })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Dialog::Empty)
    }

    /// Accepts the empty episode: nothing left that must be answered.
    pub fn is_nullable(&self) -> bool {
        match self {
            Dialog::Empty => true,
            Dialog::Atom { .. } => false,
            Dialog::Node { children, .. } => children.iter().all(Dialog::is_nullable),
            Dialog::Union(a, b) => a.is_nullable() || b.is_nullable(),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Dialog::Atom { .. })
    }

    pub fn atom_name(&self) -> Option<&Name> {
        match self {
            Dialog::Atom { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn children(&self) -> &[Dialog] {
        match self {
            Dialog::Node { children, .. } => children,
            _ => &[],
        }
    }

    pub fn solicitation_set(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub(crate) fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Dialog::Empty => {}
            Dialog::Atom { name, .. } => {
                out.insert(name.clone());
            }
            Dialog::Node { children, .. } => children.iter().for_each(|c| c.collect_names(out)),
            Dialog::Union(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Dialog::Empty => 0,
            Dialog::Atom { .. } => 1,
            Dialog::Node { children, .. } => children.iter().map(Dialog::atom_count).sum(),
            Dialog::Union(a, b) => a.atom_count() + b.atom_count(),
        }
    }

    /// Number of tree nodes, unions included.
    pub fn size(&self) -> usize {
        match self {
            Dialog::Empty | Dialog::Atom { .. } => 1,
            Dialog::Node { children, .. } => 1 + children.iter().map(Dialog::size).sum::<usize>(),
            Dialog::Union(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn total_arrows(&self) -> u32 {
        match self {
            Dialog::Empty => 0,
            Dialog::Atom { arrows, .. } => *arrows,
            Dialog::Node { arrows, children, .. } => {
                *arrows + children.iter().map(Dialog::total_arrows).sum::<u32>()
            }
            Dialog::Union(a, b) => a.total_arrows() + b.total_arrows(),
        }
    }

    pub fn is_arrow_free(&self) -> bool {
        self.total_arrows() == 0
    }

    /// True when some node strictly below the root carries arrows.
    pub fn has_arrows_below(&self) -> bool {
        match self {
            Dialog::Node { children, .. } => children.iter().any(|c| !c.is_arrow_free()),
            Dialog::Union(a, b) => !a.is_arrow_free() || !b.is_arrow_free(),
            _ => false,
        }
    }

    pub fn mentions(&self, m: Mnemonic) -> bool {
        match self {
            Dialog::Node { mnemonic, children, .. } => {
                mnemonic.normalized() == m.normalized() || children.iter().any(|c| c.mentions(m))
            }
            Dialog::Union(a, b) => a.mentions(m) || b.mentions(m),
            _ => false,
        }
    }

    pub fn has_union(&self) -> bool {
        match self {
            Dialog::Union(..) => true,
            Dialog::Node { children, .. } => children.iter().any(Dialog::has_union),
            _ => false,
        }
    }

    /// Rewrites PFA1' to C, PFAn' to PFAn* and PE' to PE*.
    pub fn normalize_mnemonics(&self) -> Dialog {
        match self {
            Dialog::Node { mnemonic, arrows, children } => Dialog::Node {
                mnemonic: mnemonic.normalized(),
                arrows: *arrows,
                children: children.iter().map(Dialog::normalize_mnemonics).collect(),
            },
            Dialog::Union(a, b) => union(a.normalize_mnemonics(), b.normalize_mnemonics()),
            other => other.clone(),
        }
    }

    pub fn at(&self, path: &Path) -> Option<&Dialog> {
        let mut cur = self;
        for &i in &path.0 {
            cur = match cur {
                Dialog::Node { children, .. } => children.get(i)?,
                Dialog::Union(a, b) => match i {
                    0 => a,
                    1 => b,
                    _ => return None,
                },
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Replaces the subtree at `path`. Panics if the path does not exist.
    pub fn replace_at(&self, path: &[usize], new: Dialog) -> Dialog {
        let Some((&i, rest)) = path.split_first() else { return new };
        match self {
            Dialog::Node { mnemonic, arrows, children } => {
                let mut ch = children.clone();
                ch[i] = ch[i].replace_at(rest, new);
                Dialog::Node { mnemonic: *mnemonic, arrows: *arrows, children: ch }
            }
            Dialog::Union(a, b) => match i {
                0 => union(a.replace_at(rest, new), (**b).clone()),
                1 => union((**a).clone(), b.replace_at(rest, new)),
                _ => panic!("union has two sides"),
            },
            _ => panic!("path leads below a leaf"),
        }
    }

    /// Union operands flattened left to right.
    pub fn alternatives(&self) -> Vec<&Dialog> {
        let mut out = Vec::new();
        fn go<'a>(d: &'a Dialog, out: &mut Vec<&'a Dialog>) {
            match d {
                Dialog::Union(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn fifteen_mnemonics_twelve_behaviours() {
        assert_eq!(Mnemonic::ALL.len(), 15);
        let distinct: BTreeSet<_> = Mnemonic::ALL.iter().map(|m| m.normalized()).collect();
        assert_eq!(distinct.len(), 12);
    }

    #[test]
    fn spellings_round_trip() {
        for m in Mnemonic::ALL {
            assert_eq!(Mnemonic::from_spelling(m.spelling()), Some(m));
        }
    }

    #[test]
    fn subdialog_classes() {
        let capable: Vec<_> = Mnemonic::ALL
            .iter()
            .copied()
            .filter(|m| *m != Mnemonic::Pfa1Prime && m.accepts_subdialogs())
            .collect();
        assert_eq!(
            capable,
            vec![Mnemonic::C, Mnemonic::Spe, Mnemonic::SpePrime, Mnemonic::Pfa1, Mnemonic::W]
        );
    }

    #[test]
    fn normalize_examples() {
        let e = node(Mnemonic::Pfa1Prime, vec![atom("a"), atom("b"), atom("c")]);
        assert_eq!(e.normalize_mnemonics(), node(Mnemonic::C, vec![atom("a"), atom("b"), atom("c")]));
        let e = node(Mnemonic::PePrime, vec![atom("a"), atom("b")]);
        assert_eq!(e.normalize_mnemonics(), node(Mnemonic::PeStar, vec![atom("a"), atom("b")]));
    }

    #[test]
    fn names_and_paths() {
        let e = node(Mnemonic::C, vec![atom("a"), node(Mnemonic::PeStar, vec![atom("b"), atom("c")])]);
        let names: Vec<_> = e.solicitation_set().into_iter().map(|n| n.as_str().into()).collect::<Vec<alloc::string::String>>();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(Dialog::Empty.solicitation_set().len(), 0);
        assert_eq!(e.at(&Path(vec![1, 0])), Some(&atom("b")));
        let r = e.replace_at(&[1, 0], atom("z"));
        assert_eq!(r.at(&Path(vec![1, 0])), Some(&atom("z")));
        assert_eq!(alloc::format!("{}", Path(vec![1, 0])), "/1/0");
    }
}
