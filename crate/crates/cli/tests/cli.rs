use std::process::Command;

use dialog_cli::cli::{run, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use dialog_core::generate::{generate, sample_seed, GenConfig};
use dialog_core::syntax::print_spec;
use dialog_core::{canonical, enumerate, parse_expr, parse_spec_file};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

// (exit code, stdout, stderr)
fn dlg(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("dlg").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn membership_verdicts() {
    assert_eq!(dlg(&["run", "C[a,b,c]", "<a b c>"]), (EXIT_OK, "MEMBER\n".into(), String::new()));
    assert_eq!(dlg(&["run", "C[a,b,c]", "<b a c>"]).0, EXIT_NEGATIVE);
    assert_eq!(dlg(&["run", "C[a,b,c]", "<b a c>"]).1, "NOT-MEMBER\n");
    let (code, out, err) = dlg(&["run", &fixture("gas.dlg"), "<credit-card octane call-attendant name receipt?>", "--trace"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "MEMBER\n"));
    assert!(err.lines().count() > 5);
}

#[test]
fn strict_completion_is_a_switch() {
    // after <a> one alternative is done and the other still wants b
    assert_eq!(dlg(&["run", "C[a] | C[a, b]", "<a>"]).1, "MEMBER\n");
    assert_eq!(dlg(&["run", "--strict-complete", "C[a] | C[a, b]", "<a>"]).1, "NOT-MEMBER\n");
    assert_eq!(dlg(&["run", "--strict-complete", "C[a] | C[a, b]", "<a b>"]).1, "MEMBER\n");
}

#[test]
fn enumeration_prints_one_episode_per_line() {
    let (code, out, _) = dlg(&["enum", "PE*[size,blend,type-of-milk]"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 13);
    // byte-identical to the library
    let spec = enumerate(&parse_expr("PE*[size,blend,type-of-milk]").unwrap()).unwrap();
    assert_eq!(out, print_spec(&spec));
    let (code, _, err) = dlg(&["enum", &fixture("chipotle.dlg")]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cap"));
}

#[test]
fn union_equals_weave() {
    let (code, out, _) = dlg(&["equiv", &fixture("breakfast-union.dlg"), &fixture("breakfast.dlg")]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "EQUIVALENT\n"));
    let (code, out, _) = dlg(&["equiv", "C[a, b]", "SPE'[a, b]"]);
    assert_eq!((code, out.as_str()), (EXIT_NEGATIVE, "DIFFER\n<b a> only in right\n"));
}

#[test]
fn parse_and_canon() {
    let src = "C[~, C[~, rewards-id], C[receipt?, ~]]";
    let (code, out, _) = dlg(&["parse", src]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "C[rewards-id, receipt?]\n"));
    assert_eq!(out.trim(), canonical(&parse_expr(src).unwrap()).to_string());
    let (_, out, _) = dlg(&["canon", "--trace", src]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "C[rewards-id, receipt?]");
    assert!(lines[1..].iter().all(|l| l.contains(" => ")));
    assert!(lines.len() > 2);
    let (code, _, err) = dlg(&["parse", "C[a,"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("1:5"));
    let (code, _, err) = dlg(&["parse", "PE*[a^]"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("R1"), "{err}");
}

#[test]
fn parse_reports_warnings_on_stderr() {
    let (code, out, err) = dlg(&["parse", "~ | a"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.is_empty());
    assert!(err.starts_with("warning:"), "{err}");
}

#[test]
fn staging_chains_through_text() {
    let mut cur = "PE*[size, blend, type-of-milk]".to_string();
    for u in ["blend", "{size, type-of-milk}"] {
        let (code, out, _) = dlg(&["stage", &cur, u]);
        assert_eq!(code, EXIT_OK, "{cur} {u}");
        cur = out.trim().to_string();
    }
    assert_eq!(cur, "~");
    assert_eq!(dlg(&["stage", "C[a, b]", "b"]).1, "REJECTED\n");
    assert_eq!(dlg(&["stage", "C[a, b]", "b"]).0, EXIT_NEGATIVE);
    assert_eq!(dlg(&["stage", &fixture("gas.dlg"), "name"]).0, EXIT_USAGE);
}

#[test]
fn mine_inverts_enum() {
    let (_, eps, _) = dlg(&["enum", &fixture("flight.dlg")]);
    let path = std::env::temp_dir().join(format!("dlg-mine-{}.eps", std::process::id()));
    std::fs::write(&path, &eps).unwrap();
    let (code, mined, _) = dlg(&["mine", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, EXIT_OK);
    let (_, back, _) = dlg(&["enum", mined.trim()]);
    assert_eq!(parse_spec_file(&back).unwrap(), parse_spec_file(&eps).unwrap());
}

#[test]
fn gen_lines_are_eval_samples() {
    let (code, out, _) = dlg(&["gen", "--seed", "7", "--count", "4"]);
    assert_eq!(code, EXIT_OK);
    for (i, line) in out.lines().enumerate() {
        let expected = generate(&GenConfig { seed: sample_seed(7, i as u64), ..GenConfig::default() });
        assert_eq!(line, expected.to_string());
        assert_eq!(parse_expr(line).unwrap(), expected);
    }
    assert_eq!(dlg(&["gen", "--arrow-probability", "2"]).0, EXIT_USAGE);
}

#[test]
fn eval_writes_report_and_histograms() {
    let dir = std::env::temp_dir().join(format!("dlg-eval-{}", std::process::id()));
    let (code, out, _) = dlg(&["eval", "--n", "10", "--seed", "1", "--out", dir.to_str().unwrap()]);
    assert!(code == EXIT_OK || code == EXIT_NEGATIVE);
    assert!(out.contains("verbosity L1 L2 L3"));
    for f in ["report.json", "l1_histogram.csv", "l2_histogram.csv"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors() {
    assert_eq!(dlg(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(dlg(&["run", "C[a]"]).0, EXIT_USAGE);
    let (code, out, _) = dlg(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("serve"));
}

#[test]
fn the_binary_exits_with_the_same_codes() {
    let bin = env!("CARGO_BIN_EXE_dlg");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let o = code(&["run", "C[a,b,c]", "<a b c>"]);
    assert_eq!((o.status.code(), o.stdout.as_slice()), (Some(0), &b"MEMBER\n"[..]));
    assert_eq!(code(&["run", "C[a,b,c]", "<c>"]).status.code(), Some(1));
    assert_eq!(code(&["enum", "C[a,"]).status.code(), Some(2));
    let o = code(&["enum", "PE*[size,blend,type-of-milk]"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 13);
}
