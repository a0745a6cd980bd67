//! Lower-bound machinery: fooling-set search against expansion, the
//! degree-pressure report built on it, and the pawn game.
//!
//! A fooling witness is a right set B of size 2^(k-1) together with at
//! least 2^k left nodes whose neighborhoods all lie inside B; its
//! existence certifies the graph is not a (2^k, 2^(k-1)+1)-expander.

mod pawn;

pub use pawn::{
    blind_black, pawn_game_run, BlackMove, BlackStrategy, FloodBlack, GameOutcome, GameResult,
    GreedyWhite, PawnGameState, RandomBlack, WhiteMove, WhiteStrategy,
};

use std::collections::BTreeSet;

use crate::bitgraph::BitGraph;
use crate::bits::BitString;
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

#[derive(Clone, Debug)]
pub struct FoolingWitness {
    pub b: BTreeSet<BitString>,
    pub s: Vec<BitString>,
    pub k: u32,
    pub c: u32,
}

impl FoolingWitness {
    /// Re-checks the witness independently of the search that found it.
    pub fn verify(&self, g: &BitGraph) -> bool {
        if self.b.len() as u64 != 1u64 << (self.k - 1) {
            return false;
        }
        if (self.s.len() as u64) < 1u64 << self.k {
            return false;
        }
        self.s.iter().all(|x| match g.neighbors(x) {
            Ok(nbrs) => nbrs.iter().all(|p| self.b.contains(p)),
            Err(_) => false,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum FoolingMode {
    Exhaustive,
    Randomized { trials: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub enum FoolingResult {
    Witness(FoolingWitness),
    NoneFound { exhaustive: bool, trials: u64 },
}

impl FoolingResult {
    pub fn witness(&self) -> Option<&FoolingWitness> {
        match self {
            FoolingResult::Witness(w) => Some(w),
            FoolingResult::NoneFound { .. } => None,
        }
    }
}

/// Searches for a right set B of size 2^(k-1) hosting >= 2^k left nodes.
/// B ranges over the full universe {0,1}^(k+c), matching a uniform draw
/// over all subsets of that size. Exhaustive mode enumerates B in
/// lexicographic order and its clean answer is a proof of absence;
/// randomized mode is only a falsifier.
pub fn fooling_search(
    g: &BitGraph,
    k: u32,
    c: u32,
    mode: FoolingMode,
    work_budget: u64,
) -> Result<FoolingResult> {
    if k == 0 {
        return Err(Error::InvalidSpec("fooling search requires k >= 1".into()));
    }
    if g.right_len() != (k + c) as usize {
        return Err(Error::ShapeMismatch(format!(
            "graph right length {} but k+c = {}",
            g.right_len(),
            k + c
        )));
    }
    if k + c >= 24 {
        return Err(Error::ResourceLimit(
            "right universe 2^(k+c) beyond desk scale".into(),
        ));
    }
    let universe: u64 = 1 << (k + c);
    let b_size = 1u64 << (k - 1);
    let s_needed = 1u64 << k;

    // Neighborhood masks over the full right universe, indexed by value.
    let nbr_masks: Vec<Vec<u64>> = (0..g.left_count())
        .map(|i| {
            let blocks = (universe as usize).div_ceil(64);
            let mut m = vec![0u64; blocks];
            for p in g.neighbors_at(i) {
                let v = p.value().expect("right length below 24 bits") as usize;
                m[v / 64] |= 1 << (v % 64);
            }
            m
        })
        .collect();

    let hosted_by = |b_mask: &[u64]| -> Vec<usize> {
        nbr_masks
            .iter()
            .enumerate()
            .filter(|(_, m)| m.iter().zip(b_mask).all(|(a, b)| a & !b == 0))
            .map(|(i, _)| i)
            .collect()
    };
    let to_witness = |b_indices: &[u64], hosted: Vec<usize>| -> FoolingWitness {
        let b = b_indices
            .iter()
            .map(|&v| BitString::from_value(v as u128, (k + c) as usize))
            .collect();
        let mut s: Vec<BitString> = hosted
            .into_iter()
            .map(|i| g.left_nodes()[i].clone())
            .collect();
        s.sort_by(BitString::length_lex_cmp);
        FoolingWitness { b, s, k, c }
    };
    let blocks = (universe as usize).div_ceil(64);
    let mask_of = |indices: &[u64]| -> Vec<u64> {
        let mut m = vec![0u64; blocks];
        for &v in indices {
            m[v as usize / 64] |= 1 << (v % 64);
        }
        m
    };

    match mode {
        FoolingMode::Exhaustive => {
            let combos = binomial(universe, b_size);
            let cost = combos.saturating_mul(g.left_count() as u64);
            if cost > work_budget {
                return Err(Error::WorkBudgetExceeded {
                    used: cost,
                    limit: work_budget,
                });
            }
            let mut indices: Vec<u64> = (0..b_size).collect();
            loop {
                let hosted = hosted_by(&mask_of(&indices));
                if hosted.len() as u64 >= s_needed {
                    return Ok(FoolingResult::Witness(to_witness(&indices, hosted)));
                }
                if !next_combination(&mut indices, universe) {
                    break;
                }
            }
            Ok(FoolingResult::NoneFound {
                exhaustive: true,
                trials: combos,
            })
        }
        FoolingMode::Randomized { trials, seed } => {
            let mut rng = SplitMix64::new(seed);
            for _ in 0..trials {
                let indices = rng.distinct_sorted(universe, b_size as usize);
                let hosted = hosted_by(&mask_of(&indices));
                if hosted.len() as u64 >= s_needed {
                    return Ok(FoolingResult::Witness(to_witness(&indices, hosted)));
                }
            }
            Ok(FoolingResult::NoneFound {
                exhaustive: false,
                trials,
            })
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Advances `indices` to the next size-|indices| combination of 0..n in
/// lexicographic order; false when exhausted.
fn next_combination(indices: &mut [u64], n: u64) -> bool {
    let m = indices.len();
    let mut i = m;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if indices[i] < n - (m - i) as u64 {
            indices[i] += 1;
            for j in i + 1..m {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
}

/// Threshold report: the degree bound D = min(2^(k-2), (l-k)/(c+2)).
/// When the graph's maximum degree stays within D, a fooling witness must
/// exist and the exhaustive search is run to produce it.
#[derive(Clone, Debug)]
pub struct DegreeReport {
    pub ell: u32,
    pub k: u32,
    pub c: u32,
    pub max_degree: usize,
    pub threshold: f64,
    pub within_threshold: bool,
    pub search: Option<FoolingResult>,
}

pub fn degree_pressure_report(
    g: &BitGraph,
    k: u32,
    c: u32,
    work_budget: u64,
) -> Result<DegreeReport> {
    let left = g.left_count() as u64;
    if !left.is_power_of_two() {
        return Err(Error::ShapeMismatch(format!(
            "left count {left} is not a power of two"
        )));
    }
    let ell = left.trailing_zeros();
    if g.right_len() != (k + c) as usize {
        return Err(Error::ShapeMismatch(format!(
            "graph right length {} but k+c = {}",
            g.right_len(),
            k + c
        )));
    }
    if ell < k {
        return Err(Error::ShapeMismatch(format!("l = {ell} below k = {k}")));
    }
    let max_degree = g.max_degree();
    // deg <= 2^(k-2)  <=>  4 deg <= 2^k; deg <= (l-k)/(c+2) exactly.
    let within_quarter = 4 * max_degree as u64 <= 1u64 << k;
    let within_ratio = (max_degree as u64) * (c as u64 + 2) <= (ell - k) as u64;
    let within_threshold = within_quarter && within_ratio;
    let threshold = (2f64.powi(k as i32 - 2)).min((ell - k) as f64 / (c as f64 + 2.0));
    let search = if within_threshold {
        Some(fooling_search(
            g,
            k,
            c,
            FoolingMode::Exhaustive,
            work_budget,
        )?)
    } else {
        None
    };
    Ok(DegreeReport {
        ell,
        k,
        c,
        max_degree,
        threshold,
        within_threshold,
        search,
    })
}
