//! Parallel evaluation runs: samples in parallel with rayon, aggregation in one pass.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use dialog_core::episodes::EnumError;
use dialog_core::experiment::{report, run_sample, ExperimentReport, Sample};
use dialog_core::generate::GenConfig;
use dialog_core::miner::MinerConfig;

use crate::formats::histogram_csv;

pub struct EvalRun {
    pub config: GenConfig,
    /// Sorted by index.
    pub samples: Vec<Sample>,
    pub report: ExperimentReport,
}

/// `n` samples from `cfg`. Identical to the sequential pipeline; only the scheduling differs.
pub fn run_eval(cfg: &GenConfig, miner: MinerConfig, n: usize) -> Result<Option<EvalRun>, EnumError> {
    let samples = (0..n).into_par_iter().map(|i| run_sample(cfg, miner, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(report(&samples).map(|report| EvalRun { config: cfg.clone(), samples, report }))
}

/// Named pass/fail checks on a report.
pub fn checks(r: &ExperimentReport) -> Vec<(&'static str, bool)> {
    vec![
        ("verb_l3 == 1", r.verb_l3 == 1.0),
        ("factor_total == verb_l1", (r.factor_total - r.verb_l1).abs() < 1e-9),
        ("factor_total == factor_orig * factor_arrow", (r.factor_total - r.factor_orig * r.factor_arrow).abs() < 1e-9),
        ("all mined unions verified", r.verified == r.n),
        ("compressible fraction >= 0.9", r.compressible_fraction >= 0.9),
    ]
}

fn histogram_json(h: &std::collections::BTreeMap<usize, usize>) -> Value {
    Value::Array(h.iter().map(|(b, c)| json!({ "bin": b, "count": c })).collect())
}

pub fn report_json(run: &EvalRun) -> Value {
    let r = &run.report;
    let c = &run.config;
    let best = &run.samples[r.max_compression_index];
    json!({
        "config": {
            "solicitations": c.solicitations,
            "arrow_probability": c.arrow_probability,
            "root": c.root.spelling(),
            "inner": c.inner.iter().map(|m| m.spelling()).collect::<Vec<_>>(),
            "balanced": c.balanced,
            "seed": c.seed,
        },
        "n": r.n,
        "verb_l1": r.verb_l1,
        "verb_l2": r.verb_l2,
        "verb_l3": r.verb_l3,
        "factor_orig": r.factor_orig,
        "factor_arrow": r.factor_arrow,
        "factor_total": r.factor_total,
        "compressible_fraction": r.compressible_fraction,
        "max_compression": {
            "index": r.max_compression_index,
            "l1": r.max_compression.0,
            "l2": r.max_compression.1,
            "expr": best.expr.to_string(),
        },
        "verified": r.verified,
        "l1_histogram": histogram_json(&r.l1_histogram),
        "l2_histogram": histogram_json(&r.l2_histogram),
        "checks": checks(r).into_iter().map(|(k, ok)| json!({ "check": k, "ok": ok })).collect::<Vec<_>>(),
        "samples": run.samples.iter().map(|s| json!({
            "index": s.index,
            "seed": s.seed,
            "expr": s.expr.to_string(),
            "l1": s.l1,
            "l2": s.l2,
            "mined": s.mined.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "verified": s.verified,
        })).collect::<Vec<_>>(),
    })
}

pub fn summary(r: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "samples               {}", r.n);
    let _ = writeln!(s, "verbosity L1 L2 L3    {:.3} {:.3} {:.3}", r.verb_l1, r.verb_l2, r.verb_l3);
    let _ = writeln!(s, "factor orig arrow     {:.3} {:.3}", r.factor_orig, r.factor_arrow);
    let _ = writeln!(s, "factor total          {:.3}", r.factor_total);
    let _ = writeln!(s, "compressible          {:.1}%", 100.0 * r.compressible_fraction);
    let _ = writeln!(
        s,
        "max compression       {} -> {} (sample {})",
        r.max_compression.0, r.max_compression.1, r.max_compression_index
    );
    let _ = writeln!(s, "verified              {}/{}", r.verified, r.n);
    for (name, ok) in checks(r) {
        let _ = writeln!(s, "{} {name}", if ok { "ok  " } else { "FAIL" });
    }
    s
}

/// Writes `report.json`, `l1_histogram.csv` and `l2_histogram.csv` into `dir`.
pub fn write_outputs(run: &EvalRun, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&report_json(run)).expect("report serializes");
    std::fs::write(dir.join("report.json"), json + "\n")?;
    std::fs::write(dir.join("l1_histogram.csv"), histogram_csv(&run.report.l1_histogram))?;
    std::fs::write(dir.join("l2_histogram.csv"), histogram_csv(&run.report.l2_histogram))?;
    Ok(())
}
