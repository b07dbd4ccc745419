//! Random W-rooted expressions for the compression experiment.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{node, Dialog, Mnemonic, Name};

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub solicitations: usize,
    pub arrow_probability: f64,
    pub root: Mnemonic,
    pub inner: Vec<Mnemonic>,
    /// Split children evenly (multinomial) rather than at uniform cut points.
    pub balanced: bool,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            solicitations: 5,
            arrow_probability: 0.5,
            root: Mnemonic::W,
            inner: alloc::vec![Mnemonic::C, Mnemonic::SpePrime, Mnemonic::W],
            balanced: true,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn check(&self) -> Result<(), &'static str> {
        if self.solicitations == 0 {
            return Err("at least one solicitation is required");
        }
        if !(0.0..=1.0).contains(&self.arrow_probability) {
            return Err("arrow probability must lie in [0, 1]");
        }
        if self.inner.is_empty() || self.inner.iter().chain([&self.root]).any(|m| !m.accepts_subdialogs()) {
            return Err("root and inner mnemonics must accept sub-dialogs");
        }
        Ok(())
    }
}

/// Seed for the `index`-th sample of a run started from `base`.
pub fn sample_seed(base: u64, index: u64) -> u64 {
    // splitmix64 over the pair
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn names(n: usize) -> Vec<Name> {
    (1..=n).map(|i| Name::new(&format!("q{i}"))).collect()
}

pub fn generate(cfg: &GenConfig) -> Dialog {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = names(cfg.solicitations);
    let tree = if names.len() == 1 {
        node(cfg.root, alloc::vec![Dialog::Atom { name: names[0].clone(), arrows: 0 }])
    } else {
        build(&names, cfg.root, cfg, &mut rng)
    };
    let mut ancestors = Vec::new();
    arrows(&tree, &mut ancestors, cfg.arrow_probability, &mut rng)
}

fn build(names: &[Name], m: Mnemonic, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Dialog {
    let k = rng.random_range(2..=names.len());
    let groups = if cfg.balanced { multinomial(names, k, rng) } else { cuts(names, k, rng) };
    let children = groups
        .into_iter()
        .map(|g| {
            if g.len() == 1 {
                Dialog::Atom { name: g[0].clone(), arrows: 0 }
            } else {
                let m = cfg.inner[rng.random_range(0..cfg.inner.len())];
                build(&g, m, cfg, rng)
            }
        })
        .collect();
    node(m, children)
}

// Each name lands in a uniform bin; draws with an empty bin are rejected.
fn multinomial(names: &[Name], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Name>> {
    loop {
        let mut bins: Vec<Vec<Name>> = alloc::vec![Vec::new(); k];
        for n in names {
            bins[rng.random_range(0..k)].push(n.clone());
        }
        if bins.iter().all(|b| !b.is_empty()) {
            return bins;
        }
    }
}

// k-1 distinct cut points over the ordered names.
fn cuts(names: &[Name], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Name>> {
    let mut points: Vec<usize> = (1..names.len()).collect();
    for i in 0..points.len() {
        let j = rng.random_range(i..points.len());
        points.swap(i, j);
    }
    let mut chosen: Vec<usize> = points[..k - 1].to_vec();
    chosen.sort_unstable();
    let mut out = Vec::new();
    let mut start = 0;
    for c in chosen.into_iter().chain([names.len()]) {
        out.push(names[start..c].to_vec());
        start = c;
    }
    out
}

// An arrowed atom gets as many arrows as it takes to reach the nearest W above its parent.
fn arrows(d: &Dialog, ancestors: &mut Vec<Mnemonic>, p: f64, rng: &mut ChaCha8Rng) -> Dialog {
    match d {
        Dialog::Atom { name, .. } => {
            let wanted = rng.random_bool(p);
            let len = ancestors.len();
            let target = (1..len).find(|&k| ancestors[len - 1 - k] == Mnemonic::W);
            let k = if wanted { target.unwrap_or(0) } else { 0 };
            Dialog::Atom { name: name.clone(), arrows: k as u32 }
        }
        Dialog::Node { mnemonic, children, .. } => {
            ancestors.push(*mnemonic);
            let ch = children.iter().map(|c| arrows(c, ancestors, p, rng)).collect();
            ancestors.pop();
            node(*mnemonic, ch)
        }
        other => other.clone(),
    }
}
