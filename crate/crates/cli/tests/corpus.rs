use dialog_cli::harness::run_eval;
use dialog_core::generate::GenConfig;
use dialog_core::miner::MinerConfig;
use dialog_core::parse_expr;

#[test]
fn seed_42_corpus_is_stable() {
    let path = format!("{}/../../fixtures/corpus-seed42.tsv", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 100);
    let run = run_eval(&GenConfig { seed: 42, ..GenConfig::default() }, MinerConfig::default(), 100).unwrap().unwrap();
    for (row, s) in rows.iter().zip(&run.samples) {
        assert_eq!(row[0].parse::<usize>().unwrap(), s.index);
        assert_eq!(row[1], s.expr.to_string());
        assert_eq!(parse_expr(row[1]).unwrap(), s.expr);
        assert_eq!((row[2].parse::<usize>().unwrap(), row[3].parse::<usize>().unwrap()), (s.l1, s.l2), "{}", row[1]);
        assert!(s.verified);
    }
}
