//! JSON shapes shared by the HTTP facade and the CLI's `--json` output.

use serde_json::{json, Value};

use dialog_core::simplify::RewriteStep;
use dialog_core::stage::{RejectKind, Rejection};
use dialog_core::{Dialog, EnumError, ParseError, SyntaxError, ValidationReport, Violation};

/// Structured AST for clients that would rather not parse the printed form.
pub fn tree(d: &Dialog) -> Value {
    match d {
        Dialog::Empty => json!({ "kind": "empty" }),
        Dialog::Atom { name, arrows } => json!({ "kind": "atom", "name": name.as_str(), "arrows": arrows }),
        Dialog::Node { mnemonic, arrows, children } => json!({
            "kind": "node",
            "mnemonic": mnemonic.spelling(),
            "arrows": arrows,
            "children": children.iter().map(tree).collect::<Vec<_>>(),
        }),
        Dialog::Union(a, b) => json!({ "kind": "union", "left": tree(a), "right": tree(b) }),
    }
}

pub fn syntax_error(e: &SyntaxError) -> Value {
    json!({ "error": "syntax", "line": e.line, "column": e.column, "message": e.message })
}

fn violation(v: &Violation) -> Value {
    json!({ "rule": v.rule.to_string(), "path": v.path.0, "message": v.message })
}

pub fn validation(r: &ValidationReport) -> Value {
    json!({
        "error": "invalid",
        "violations": r.violations.iter().map(violation).collect::<Vec<_>>(),
        "warnings": r.warnings.iter().map(violation).collect::<Vec<_>>(),
    })
}

pub fn warnings(r: &ValidationReport) -> Value {
    Value::Array(r.warnings.iter().map(violation).collect())
}

/// Body for a parse failure and whether it is a validation failure (as opposed to a syntax error).
pub fn parse_error(e: &ParseError) -> (bool, Value) {
    match e {
        ParseError::Syntax(s) => (false, syntax_error(s)),
        ParseError::Invalid(r) => (true, validation(r)),
    }
}

pub fn enum_error(e: &EnumError) -> Value {
    match e {
        EnumError::CapExceeded { names, cap } => {
            json!({ "error": "cap-exceeded", "names": names, "cap": cap, "message": e.to_string() })
        }
    }
}

pub fn rewrite_step(s: &RewriteStep) -> Value {
    json!({ "rule": s.rule.id(), "path": s.path.0, "before": s.before.to_string(), "after": s.after.to_string() })
}

pub fn reject_kind(k: RejectKind) -> &'static str {
    match k {
        RejectKind::Finished => "finished",
        RejectKind::Unknown => "unknown",
        RejectKind::Refused => "refused",
        RejectKind::Unsupported => "unsupported",
    }
}

pub fn rejection(r: &Rejection) -> Value {
    json!({
        "error": "rejected",
        "kind": reject_kind(r.kind),
        "path": r.path.0,
        "mnemonic": r.mnemonic.map(|m| m.spelling()),
        "names": r.names.iter().map(|n| n.as_str()).collect::<Vec<_>>(),
        "message": r.message,
    })
}
