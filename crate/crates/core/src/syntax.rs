//! ASCII surface syntax: parser and printer.
//!
//! ```text
//! expr  := term ('|' term)*            left-associative, lowest precedence
//! term  := '~' | atom | MN arrows? '[' (expr (',' expr)*)? ']' | '(' expr ')' arrows?
//! atom  := name arrows?
//! name  := letter (letter | digit | '-' | '_')* '?'?
//! arrows:= '^'+
//! ```
//! `#` starts a comment that runs to the end of the line.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::episodes::EnumeratedSpec;
use crate::expr::{union, Dialog, Mnemonic, Name};
use crate::utterance::{Episode, Utterance};
use crate::validate::{validate, ValidationReport};

/// Name used for the hole marker when parsing contexts.
pub const HOLE: &str = "@";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl core::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax(SyntaxError),
    Invalid(ValidationReport),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax(e) => write!(f, "syntax error at {e}"),
            ParseError::Invalid(r) => write!(f, "invalid expression: {r}"),
        }
    }
}

impl core::error::Error for ParseError {}

impl From<SyntaxError> for ParseError {
    fn from(e: SyntaxError) -> Self {
        ParseError::Syntax(e)
    }
}

/// Parses, normalizes mnemonics and validates.
pub fn parse_expr(src: &str) -> Result<Dialog, ParseError> {
    let d = parse_expr_raw(src)?.normalize_mnemonics();
    let report = validate(&d);
    if report.ok() {
        Ok(d)
    } else {
        Err(ParseError::Invalid(report))
    }
}

/// Parses without normalization or validation.
pub fn parse_expr_raw(src: &str) -> Result<Dialog, SyntaxError> {
    let mut p = Parser::new(src, false);
    let d = p.expr()?;
    p.end()?;
    Ok(d)
}

/// Parses an expression that may contain the hole marker `@`; it comes back as an atom named `@`.
pub fn parse_with_hole(src: &str) -> Result<Dialog, SyntaxError> {
    let mut p = Parser::new(src, true);
    let d = p.expr()?;
    p.end()?;
    Ok(d)
}

pub fn print_expr(d: &Dialog) -> String {
    d.to_string()
}

pub fn parse_utterance(src: &str) -> Result<Utterance, SyntaxError> {
    let mut p = Parser::new(src, false);
    p.skip_ws();
    let u = p.turn()?;
    p.end()?;
    Ok(u)
}

pub fn print_utterance(u: &Utterance) -> String {
    u.to_string()
}

pub fn parse_episode(src: &str) -> Result<Episode, SyntaxError> {
    let mut p = Parser::new(src, false);
    let e = p.episode()?;
    p.end()?;
    Ok(e)
}

pub fn print_episode(e: &Episode) -> String {
    e.to_string()
}

/// One episode per line; blank lines and `#` comments are skipped; duplicates collapse.
pub fn parse_spec_file(src: &str) -> Result<EnumeratedSpec, SyntaxError> {
    let mut spec = EnumeratedSpec::default();
    for (i, raw) in src.lines().enumerate() {
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let e = parse_episode(line).map_err(|mut e| {
            e.line = i + 1;
            e
        })?;
        spec.insert(e);
    }
    Ok(spec)
}

/// Episodes in set order, one per line, each newline-terminated.
pub fn print_spec(spec: &EnumeratedSpec) -> String {
    let mut out = String::new();
    for e in spec.episodes() {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

fn is_value_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ',' | '{' | '}' | '<' | '>' | '=' | '#')
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allow_hole: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_hole: bool) -> Self {
        Parser { src, pos: 0, allow_hole }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> SyntaxError {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.chars().count(), |k| before[k + 1..].chars().count()) + 1;
        SyntaxError { line, column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        self.error_at(self.pos, message)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(c) => self.error(format!("expected {wanted}, found '{c}'")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn end(&mut self) -> Result<(), SyntaxError> {
        self.skip_ws();
        if self.peek().is_some() {
            Err(self.unexpected("end of input"))
        } else {
            Ok(())
        }
    }

    fn arrows(&mut self) -> u32 {
        let mut n = 0;
        loop {
            self.skip_ws();
            if self.peek() == Some('^') {
                self.bump();
                n += 1;
            } else {
                return n;
            }
        }
    }

    fn expr(&mut self) -> Result<Dialog, SyntaxError> {
        let mut left = self.term()?;
        while self.eat('|') {
            let right = self.term()?;
            left = union(left, right);
        }
        Ok(left)
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if is_name_start(c) => {
                self.bump();
            }
            _ => return Err(self.unexpected("a name")),
        }
        while matches!(self.peek(), Some(c) if is_name_char(c)) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn term(&mut self) -> Result<Dialog, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('~') => {
                self.bump();
                Ok(Dialog::Empty)
            }
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                let k = self.arrows();
                if k == 0 {
                    return Ok(inner);
                }
                if !inner.can_carry_arrows() {
                    return Err(self.error_at(start, "arrows may decorate only solicitations and mnemonic expressions"));
                }
                let total = inner.arrows() + k;
                Ok(inner.with_arrows(total))
            }
            Some('@') if self.allow_hole => {
                self.bump();
                Ok(Dialog::Atom { name: Name::new(HOLE), arrows: 0 })
            }
            Some(c) if is_name_start(c) => self.named_term(start),
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn named_term(&mut self, start: usize) -> Result<Dialog, SyntaxError> {
        let mut word = self.ident()?;
        let mut suffixed = false;
        match self.peek() {
            Some(c @ ('*' | '\'')) => {
                self.bump();
                word.push(c);
                suffixed = true;
            }
            Some('?') => {
                self.bump();
                word.push('?');
            }
            _ => {}
        }
        let arrows = self.arrows();
        self.skip_ws();
        if self.peek() == Some('[') {
            let Some(mnemonic) = Mnemonic::from_spelling(&word) else {
                return Err(self.error_at(start, format!("unknown mnemonic '{word}'")));
            };
            self.bump();
            let mut children = Vec::new();
            if !self.eat(']') {
                loop {
                    children.push(self.expr()?);
                    if self.eat(']') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            return Ok(Dialog::Node { mnemonic, arrows, children });
        }
        if suffixed {
            return Err(self.error_at(start, format!("'{word}' needs a bracketed child list")));
        }
        Ok(Dialog::Atom { name: Name::new(&word), arrows })
    }

    fn payload_name(&mut self) -> Result<(Name, Option<String>), SyntaxError> {
        let mut word = self.ident()?;
        if self.peek() == Some('?') {
            self.bump();
            word.push('?');
        }
        self.skip_ws();
        if self.peek() == Some('=') {
            self.bump();
            self.skip_ws();
            let start = self.pos;
            while matches!(self.peek(), Some(c) if is_value_char(c)) {
                self.bump();
            }
            if self.pos == start {
                return Err(self.error("expected a value after '='"));
            }
            return Ok((Name::new(&word), Some(self.src[start..self.pos].to_string())));
        }
        Ok((Name::new(&word), None))
    }

    fn turn(&mut self) -> Result<Utterance, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        let mut items = Vec::new();
        if self.eat('{') {
            loop {
                items.push(self.payload_name()?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        } else {
            items.push(self.payload_name()?);
        }
        let mut seen = BTreeSet::new();
        for (n, _) in &items {
            if !seen.insert(n.clone()) {
                return Err(self.error_at(start, format!("duplicate solicitation {n} in one utterance")));
            }
        }
        let mut u = Utterance::from_set(seen).expect("at least one name");
        for (n, v) in items {
            if let Some(v) = v {
                u = u.with_payload(n.as_str(), &v);
            }
        }
        Ok(u)
    }

    fn episode(&mut self) -> Result<Episode, SyntaxError> {
        self.expect('<')?;
        let start = self.pos;
        let mut turns = Vec::new();
        while !self.eat('>') {
            if self.peek().is_none() {
                return Err(self.unexpected("'>'"));
            }
            turns.push(self.turn()?);
        }
        let e = Episode::new(turns);
        if let Some(n) = e.duplicate() {
            return Err(self.error_at(start, format!("solicitation {n} answered twice")));
        }
        Ok(e)
    }
}

fn write_children(f: &mut fmt::Formatter<'_>, children: &[Dialog]) -> fmt::Result {
    f.write_str("[")?;
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_nested(f, c)?;
    }
    f.write_str("]")
}

// Unions below a mnemonic need parentheses to survive re-parsing.
pub(crate) fn write_nested(f: &mut fmt::Formatter<'_>, d: &Dialog) -> fmt::Result {
    if let Dialog::Union(..) = d {
        write!(f, "({d})")
    } else {
        write!(f, "{d}")
    }
}

fn write_arrows(f: &mut fmt::Formatter<'_>, n: u32) -> fmt::Result {
    for _ in 0..n {
        f.write_str("^")?;
    }
    Ok(())
}

impl fmt::Display for Dialog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dialog::Empty => f.write_str("~"),
            Dialog::Atom { name, arrows } => {
                write!(f, "{name}")?;
                write_arrows(f, *arrows)
            }
            Dialog::Node { mnemonic, arrows, children } => {
                write!(f, "{mnemonic}")?;
                write_arrows(f, *arrows)?;
                write_children(f, children)
            }
            Dialog::Union(a, b) => {
                write!(f, "{a} | ")?;
                write_nested(f, b)
            }
        }
    }
}

fn write_answer(f: &mut fmt::Formatter<'_>, u: &Utterance, n: &Name) -> fmt::Result {
    write!(f, "{n}")?;
    if let Some(v) = u.payload(n) {
        write!(f, "={v}")?;
    }
    Ok(())
}

impl fmt::Display for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_single() {
            return write_answer(f, self, n);
        }
        f.write_str("{")?;
        for (i, n) in self.answers().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_answer(f, self, n)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Episode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, t) in self.turns.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(">")
    }
}

impl fmt::Debug for Episode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse or panic with the diagnostic. For tests and fixtures.
pub fn expr(src: &str) -> Dialog {
    match parse_expr(src) {
        Ok(d) => d,
        Err(e) => panic!("{src}: {e}"),
    }
}

pub fn episode(src: &str) -> Episode {
    match parse_episode(src) {
        Ok(e) => e,
        Err(e) => panic!("{src}: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{atom, node, Mnemonic::*};
    use alloc::vec;

    #[test]
    fn examples_parse() {
        assert_eq!(
            expr("C[credit-card, octane, receipt?]"),
            node(C, vec![atom("credit-card"), atom("octane"), atom("receipt?")])
        );
        assert_eq!(expr("~"), Dialog::Empty);
        let i = node(I, vec![atom("salary"), atom("age")]).with_arrows(1);
        assert_eq!(parse_expr_raw("I^[salary, age]").unwrap(), i);
        assert_eq!(parse_expr_raw("(I[salary, age])^").unwrap(), i);
        // alone it has nowhere to send control; embedded under a W it is fine
        assert!(matches!(parse_expr("I^[salary, age]"), Err(ParseError::Invalid(_))));
        assert_eq!(expr("W[C[I^[salary, age], x], y]").children()[0].children()[0], i);
        let b = expr("W[C[eggs^, toast], C[coffee^, cream?]]");
        assert_eq!(
            b,
            node(
                W,
                vec![
                    node(C, vec![atom("eggs").with_arrows(1), atom("toast")]),
                    node(C, vec![atom("coffee").with_arrows(1), atom("cream?")]),
                ]
            )
        );
    }

    #[test]
    fn parenthesized_arrows_match_mnemonic_arrows() {
        assert_eq!(parse_expr_raw("I^[x, y]").unwrap(), parse_expr_raw("(I[x,y])^").unwrap());
        assert!(parse_expr_raw("(a | b)^").is_err());
    }

    #[test]
    fn printing() {
        assert_eq!(print_expr(&node(C, vec![atom("a"), atom("b")])), "C[a, b]");
        assert_eq!(print_expr(&Dialog::Empty), "~");
        assert_eq!(
            print_expr(&node(PeStar, vec![atom("size"), atom("blend"), atom("type-of-milk")])),
            "PE*[size, blend, type-of-milk]"
        );
        assert_eq!(print_expr(&parse_expr_raw("SPE'^^[a^, PFAn'[b, c]]").unwrap()), "SPE'^^[a^, PFAn'[b, c]]");
    }

    #[test]
    fn union_is_left_associative() {
        let d = parse_expr_raw("a | b | c").unwrap();
        assert_eq!(d, union(union(atom("a"), atom("b")), atom("c")));
        assert_eq!(print_expr(&d), "a | b | c");
        let r = parse_expr_raw("a | (b | c)").unwrap();
        assert_eq!(r, union(atom("a"), union(atom("b"), atom("c"))));
        assert_eq!(print_expr(&r), "a | (b | c)");
    }

    #[test]
    fn normalization_on_parse() {
        assert_eq!(expr("PFA1'[a, b, c]"), expr("C[a, b, c]"));
        assert_eq!(expr("PE'[a, b]"), expr("PE*[a, b]"));
        assert_eq!(expr("PFAn'[a, b]"), expr("PFAn*[a, b]"));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_expr_raw("C[a,\n  b,, c]").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = parse_expr_raw("FOO[a]").unwrap_err();
        assert!(e.message.contains("unknown mnemonic"));
        let e = parse_expr_raw("PE*").unwrap_err();
        assert!(e.message.contains("bracketed"));
        match parse_expr("PE*[credit-card^, octane]") {
            Err(ParseError::Invalid(r)) => assert!(!r.ok()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_are_whitespace() {
        assert_eq!(expr("# breakfast\nC[a, # first\n b]"), expr("C[a, b]"));
    }

    #[test]
    fn episodes() {
        let e = episode("<size {blend, type-of-milk}>");
        assert_eq!(e.len(), 2);
        assert_eq!(e.turns[1].len(), 2);
        assert_eq!(episode("<a>").turns, vec![Utterance::single("a")]);
        assert_eq!(episode("<{salary, credit-score, age}>").turns[0].len(), 3);
        assert_eq!(print_episode(&e), "<size {blend, type-of-milk}>");
        assert_eq!(print_episode(&episode("<{a}>")), "<a>");
        assert!(parse_episode("<a {b, a}>").is_err());
        assert!(parse_episode("<{a, a}>").is_err());
        assert_eq!(episode("<>").len(), 0);
    }

    #[test]
    fn payloads_round_trip() {
        let e = episode("<size=large {blend=dark, type-of-milk=skim} receipt?=yes>");
        assert_eq!(print_episode(&e), "<size=large {blend=dark, type-of-milk=skim} receipt?=yes>");
        assert_eq!(e.without_payloads(), episode("<size {blend, type-of-milk} receipt?>"));
    }

    #[test]
    fn spec_files() {
        let text = "# three\n<size {blend, type-of-milk}>\n<blend {size, type-of-milk}>\n\n<type-of-milk {size, blend}>\n";
        assert_eq!(parse_spec_file(text).unwrap().size(), 3);
        assert_eq!(parse_spec_file("").unwrap().size(), 0);
        assert_eq!(parse_spec_file("<a b>\n<a b>  # again\n").unwrap().size(), 1);
        let err = parse_spec_file("<a>\n<b\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn hole_marker_only_when_allowed() {
        assert!(parse_expr_raw("C[@, a]").is_err());
        let d = parse_with_hole("C[@, a]").unwrap();
        assert_eq!(d, node(C, vec![atom(HOLE), atom("a")]));
    }
}
