//! Generate, enumerate, mine, verify; then average.
//!
//! L3 is the generated expression (size 1), L1 its episode set, L2 the mined union.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::episodes::{enumerate_capped, EnumError};
use crate::expr::{union_all, Dialog};
use crate::generate::{generate, sample_seed, GenConfig};
use crate::miner::{mine_with, MinerConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub index: usize,
    pub seed: u64,
    pub expr: Dialog,
    /// Episode count.
    pub l1: usize,
    /// Expressions in the mined union.
    pub l2: usize,
    pub mined: Vec<Dialog>,
    /// The mined union enumerates exactly the sample's episodes.
    pub verified: bool,
}

pub fn run_sample(cfg: &GenConfig, miner: MinerConfig, index: usize) -> Result<Sample, EnumError> {
    let seed = sample_seed(cfg.seed, index as u64);
    let expr = generate(&GenConfig { seed, ..cfg.clone() });
    let spec = enumerate_capped(&expr, miner.cap)?;
    let mined = mine_with(&spec, miner)?;
    let verified = match union_all(mined.iter().cloned()) {
        Some(u) => enumerate_capped(&u, miner.cap)? == spec,
        None => spec.is_empty(),
    };
    Ok(Sample { index, seed, expr, l1: spec.size(), l2: mined.len(), mined, verified })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub n: usize,
    pub verb_l1: f64,
    pub verb_l2: f64,
    pub verb_l3: f64,
    pub factor_orig: f64,
    pub factor_arrow: f64,
    pub factor_total: f64,
    /// Share of samples whose mined union is smaller than the episode set.
    pub compressible_fraction: f64,
    /// (L1 size, L2 size) of the sample with the largest L1/L2 ratio.
    pub max_compression: (usize, usize),
    pub max_compression_index: usize,
    pub verified: usize,
    pub l1_histogram: BTreeMap<usize, usize>,
    pub l2_histogram: BTreeMap<usize, usize>,
}

/// Arithmetic mean; None for an empty set.
pub fn verbosity(sizes: &[usize]) -> Option<f64> {
    if sizes.is_empty() {
        return None;
    }
    Some(sizes.iter().sum::<usize>() as f64 / sizes.len() as f64)
}

fn histogram(sizes: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for s in sizes {
        *h.entry(s).or_insert(0) += 1;
    }
    h
}

/// None when `samples` is empty.
pub fn report(samples: &[Sample]) -> Option<ExperimentReport> {
    let l1: Vec<usize> = samples.iter().map(|s| s.l1).collect();
    let l2: Vec<usize> = samples.iter().map(|s| s.l2).collect();
    let l3: Vec<usize> = samples.iter().map(|_| 1).collect();
    let (v1, v2, v3) = (verbosity(&l1)?, verbosity(&l2)?, verbosity(&l3)?);
    let compressible = samples.iter().filter(|s| s.l2 < s.l1).count();
    let best = samples
        .iter()
        .max_by(|a, b| {
            // a.l1/a.l2 vs b.l1/b.l2 without division; earlier index wins ties
            (a.l1 * b.l2).cmp(&(b.l1 * a.l2)).then(b.index.cmp(&a.index))
        })?;
    Some(ExperimentReport {
        n: samples.len(),
        verb_l1: v1,
        verb_l2: v2,
        verb_l3: v3,
        factor_orig: v1 / v2,
        factor_arrow: v2 / v3,
        factor_total: v1 / v3,
        compressible_fraction: compressible as f64 / samples.len() as f64,
        max_compression: (best.l1, best.l2),
        max_compression_index: best.index,
        verified: samples.iter().filter(|s| s.verified).count(),
        l1_histogram: histogram(l1.into_iter()),
        l2_histogram: histogram(l2.into_iter()),
    })
}

/// Sequential pipeline over `n` samples.
pub fn run_experiment(cfg: &GenConfig, miner: MinerConfig, n: usize) -> Result<Option<ExperimentReport>, EnumError> {
    let samples = (0..n).map(|i| run_sample(cfg, miner, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(report(&samples))
}
