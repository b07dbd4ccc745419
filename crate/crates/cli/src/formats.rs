//! `.dlg` (one expression, `#` comments) and `.eps` (one episode per line) files, plus CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Read};
use std::path::Path;

use dialog_core::episodes::EnumeratedSpec;
use dialog_core::{parse_expr, parse_spec_file, Dialog, ParseError, SyntaxError};

/// `-` reads standard input; a path to an existing file reads the file; anything else is the text itself.
pub fn read_source(arg: &str) -> io::Result<String> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    let p = Path::new(arg);
    if p.is_file() {
        return std::fs::read_to_string(p);
    }
    Ok(arg.to_string())
}

pub fn load_dlg(path: &Path) -> Result<Dialog, LoadError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_expr(&text)?)
}

pub fn load_eps(path: &Path) -> Result<EnumeratedSpec, LoadError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_spec_file(&text)?)
}

#[derive(Debug)]
pub enum LoadError {
    Io(io::Error),
    Parse(ParseError),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "{e}"),
            LoadError::Parse(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<io::Error> for LoadError {
    fn from(e: io::Error) -> Self {
        LoadError::Io(e)
    }
}

impl From<ParseError> for LoadError {
    fn from(e: ParseError) -> Self {
        LoadError::Parse(e)
    }
}

impl From<SyntaxError> for LoadError {
    fn from(e: SyntaxError) -> Self {
        LoadError::Parse(ParseError::Syntax(e))
    }
}

/// `bin,count` header, then one row per bin in ascending order.
pub fn histogram_csv(h: &BTreeMap<usize, usize>) -> String {
    let mut out = String::from("bin,count\n");
    for (bin, count) in h {
        let _ = writeln!(out, "{bin},{count}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_in_bin_order() {
        let h = BTreeMap::from([(6, 2), (1, 5)]);
        assert_eq!(histogram_csv(&h), "bin,count\n1,5\n6,2\n");
        assert_eq!(histogram_csv(&BTreeMap::new()), "bin,count\n");
    }

    #[test]
    fn literal_text_passes_through() {
        assert_eq!(read_source("C[a, b]").unwrap(), "C[a, b]");
    }

    #[test]
    fn fixtures_load() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
        let d = load_dlg(&dir.join("gas.dlg")).unwrap();
        assert_eq!(d.to_string(), "W[C[call-attendant, name], C[credit-card, octane^, receipt?]]");
        assert_eq!(load_eps(&dir.join("coffee.eps")).unwrap().size(), 13);
        assert!(matches!(load_dlg(&dir.join("missing.dlg")), Err(LoadError::Io(_))));
    }
}
