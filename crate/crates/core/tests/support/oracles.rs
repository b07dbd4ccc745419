//! Fixture access and independent episode-set oracles.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use dialog_core::{enumerate, parse_episode, parse_expr, parse_spec_file, Dialog, Episode, EnumeratedSpec};

pub fn expr(s: &str) -> Dialog {
    parse_expr(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn ep(s: &str) -> Episode {
    parse_episode(s).unwrap()
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn episodes_of(spec: &EnumeratedSpec) -> BTreeSet<String> {
    spec.episodes().iter().map(|e| e.to_string()).collect()
}

pub fn timed_enum(src: &str) -> BTreeSet<String> {
    let start = Instant::now();
    let spec = enumerate(&expr(src)).unwrap();
    assert!(start.elapsed() < Duration::from_secs(1), "{src} took {:?}", start.elapsed());
    episodes_of(&spec)
}

pub fn render(turns: &[Vec<&str>]) -> String {
    let parts: Vec<String> = turns
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.sort();
            if t.len() == 1 {
                t[0].to_string()
            } else {
                format!("{{{}}}", t.join(", "))
            }
        })
        .collect();
    format!("<{}>", parts.join(" "))
}

// All orderings of `items`.
pub fn permutations<'a>(items: &[&'a str]) -> Vec<Vec<&'a str>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

// Ordered set partitions: pick a non-empty first block, recurse on the rest.
pub fn ordered_partitions<'a>(items: &[&'a str]) -> Vec<Vec<Vec<&'a str>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let n = items.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let block: Vec<&str> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect();
        let rest: Vec<&str> = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| items[i]).collect();
        for mut tail in ordered_partitions(&rest) {
            tail.insert(0, block.clone());
            out.push(tail);
        }
    }
    out
}

// Interleavings of two sequences that keep each one's order.
pub fn shuffles<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<Vec<&'a str>> {
    match (a.split_first(), b.split_first()) {
        (None, _) => vec![b.to_vec()],
        (_, None) => vec![a.to_vec()],
        (Some((x, ra)), Some((y, rb))) => {
            let mut out = Vec::new();
            for mut s in shuffles(ra, b) {
                s.insert(0, x);
                out.push(s);
            }
            for mut s in shuffles(a, rb) {
                s.insert(0, y);
                out.push(s);
            }
            out
        }
    }
}

pub fn singles(seqs: Vec<Vec<&str>>) -> BTreeSet<String> {
    seqs.iter().map(|s| render(&s.iter().map(|x| vec![*x]).collect::<Vec<_>>())).collect()
}

pub fn golden(file: &str) -> BTreeSet<String> {
    episodes_of(&parse_spec_file(&fixture(file)).unwrap())
}

pub const WALKTHROUGH_INPUT: &str = "<credit-card=1234 octane=93 call-attendant=call name=Joseph receipt?=yes>";

/// The configurations of the gas-station walkthrough, in order: stack top first, current, remaining input.
pub fn walkthrough_boxes() -> Vec<String> {
    let all = "credit-card=1234 octane=93 call-attendant=call name=Joseph receipt?=yes";
    let after_one = "octane=93 call-attendant=call name=Joseph receipt?=yes";
    let after_two = "call-attendant=call name=Joseph receipt?=yes";
    vec![
        format!("[const ~] | W[C[call-attendant, name], C[credit-card, octane^, receipt?]] | {all}"),
        format!("[W[C[call-attendant, name], @], const ~] | C[credit-card, octane^, receipt?] | {all}"),
        format!("[C[@, octane^, receipt?], W[C[call-attendant, name], @], const ~] | credit-card | {all}"),
        format!("[W[C[call-attendant, name], @], const ~] | C[octane^, receipt?] | {after_one}"),
        format!("[C[@, receipt?], W[C[call-attendant, name], @], const ~] | octane^ | {after_one}"),
        format!("[const ~] | W[C[call-attendant, name], receipt?] | {after_two}"),
        format!("[W[@, receipt?], const ~] | C[call-attendant, name] | {after_two}"),
    ]
}
