//! Seeded random expander generation, expansion verification (exact,
//! all-t, and Monte Carlo), and disperser-style amplification by tagged
//! disjoint copies.
//!
//! A graph is a (K,K')-expander when every set of K left nodes has at
//! least K' distinct neighbors. The exact verifier runs the dual
//! enumeration: a violating left set S of size K has a neighborhood that
//! fits inside some right set B with |B| <= K'-1, and B can be taken to be
//! a union of left neighborhoods, so only such unions are enumerated.

use std::collections::{BTreeSet, HashSet};

use crate::bitgraph::{disjoint_union, BitGraph};
use crate::bits::BitString;
use crate::budget::WorkMeter;
use crate::error::Error;
use crate::rng::{substream, SplitMix64};
use crate::Result;

/// Parameters for one random expander: all `degree` neighbors of every
/// left node are drawn uniformly and independently from {0,1}^right_len.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpanderSpec {
    pub n: u32,
    pub k: u32,
    pub right_len: u32,
    pub degree: u32,
    pub seed: u64,
}

impl ExpanderSpec {
    /// Fixed-length spec: left nodes {0,1}^n, right length k+2, degree n+1.
    /// When n+1 exceeds the whole right side 2^(k+2), the degree is clamped
    /// to it and nodes are simply connected to every right node (distinct
    /// neighbors cannot do better).
    pub fn fixed_length(n: u32, k: u32, seed: u64) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidSpec(format!(
                "fixed-length spec requires k < n, got k={k}, n={n}"
            )));
        }
        let right_count: u64 = 1 << (k + 2);
        Ok(ExpanderSpec {
            n,
            k,
            right_len: k + 2,
            degree: ((n + 1) as u64).min(right_count) as u32,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidSpec("degree must be >= 1".into()));
        }
        if self.n >= 26 {
            return Err(Error::ResourceLimit(format!(
                "left universe 2^{} is beyond desk scale",
                self.n
            )));
        }
        if self.right_len >= 63 {
            return Err(Error::InvalidSpec("right_len must be < 63".into()));
        }
        Ok(())
    }
}

/// Parameters of a disperser used as an amplification base: every left set
/// of size >= K misses at most a delta fraction of the right side.
#[derive(Clone, Debug)]
pub struct DisperserSpec {
    pub k_threshold: u64,
    pub delta: f64,
    pub degree: u64,
    pub alpha: f64,
    pub copies: u64,
}

impl DisperserSpec {
    /// Copy count for turning a half-missing disperser into an expander:
    /// t = max(1, ceil(2 n^3 / (alpha D))).
    pub fn for_amplification(
        n: u64,
        k_threshold: u64,
        delta: f64,
        degree: u64,
        alpha: f64,
    ) -> Result<Self> {
        let spec = DisperserSpec {
            k_threshold,
            delta,
            degree,
            alpha,
            copies: 0,
        };
        spec.validate_params()?;
        let t = ((2.0 * (n as f64).powi(3)) / (alpha * degree as f64)).ceil() as u64;
        Ok(DisperserSpec {
            copies: t.max(1),
            ..spec
        })
    }

    pub fn with_copies(copies: u64) -> Self {
        DisperserSpec {
            k_threshold: 0,
            delta: 0.5,
            degree: 1,
            alpha: 1.0,
            copies,
        }
    }

    fn validate_params(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "delta {} not in (0,1)",
                self.delta
            )));
        }
        if self.degree == 0 || self.alpha <= 0.0 {
            return Err(Error::InvalidSpec(
                "degree and alpha must be positive".into(),
            ));
        }
        Ok(())
    }
}

const RESAMPLE_ROUNDS: u32 = 64;

/// Draws a graph with left set {0,1}^n where each node independently gets
/// `degree` distinct uniform right neighbors. Sampling is with
/// replacement; collisions are resampled (up to a fixed retry cap) so each
/// node ends with exactly `degree` distinct neighbors. Deterministic in
/// the seed: each left node consumes its own substream.
pub fn gen_random_expander(spec: &ExpanderSpec) -> Result<BitGraph> {
    spec.validate()?;
    let right_count: u64 = 1 << spec.right_len;
    if right_count < spec.degree as u64 {
        return Err(Error::GenerationFailure(format!(
            "cannot pick {} distinct neighbors from 2^{} right nodes",
            spec.degree, spec.right_len
        )));
    }
    let mut rows = Vec::with_capacity(1 << spec.n);
    for x in BitString::all_of_length(spec.n as usize) {
        let nbrs = if spec.degree as u64 == right_count {
            (0..right_count)
                .map(|v| BitString::from_value(v as u128, spec.right_len as usize))
                .collect()
        } else {
            let mut rng = substream(spec.seed, &x);
            sample_distinct_rights(&mut rng, right_count, spec.right_len as usize, spec.degree)?
        };
        rows.push((x, nbrs));
    }
    BitGraph::new(spec.right_len as usize, rows)
}

fn sample_distinct_rights(
    rng: &mut SplitMix64,
    right_count: u64,
    right_len: usize,
    degree: u32,
) -> Result<Vec<BitString>> {
    let mut taken: HashSet<u64> = HashSet::with_capacity(degree as usize);
    let mut nbrs = Vec::with_capacity(degree as usize);
    for _ in 0..degree {
        let mut rounds = 0;
        loop {
            let v = rng.below(right_count);
            if taken.insert(v) {
                nbrs.push(BitString::from_value(v as u128, right_len));
                break;
            }
            rounds += 1;
            if rounds >= RESAMPLE_ROUNDS {
                return Err(Error::GenerationFailure(format!(
                    "slot not filled after {RESAMPLE_ROUNDS} resampling rounds"
                )));
            }
        }
    }
    Ok(nbrs)
}

/// Variable-length family member: left nodes are all strings of length
/// k..=max_len, right length k+3. A node x gets min(|x|+3, 2^(k+3))
/// random distinct neighbors; when that minimum is the whole right side
/// (in particular for every node longer than 2^(k+3)) it is connected to
/// all right nodes.
pub fn gen_variable_length_expander(
    k: u32,
    max_len: u32,
    seed: u64,
    node_cap: u64,
) -> Result<BitGraph> {
    if max_len < k {
        return Err(Error::InvalidSpec(format!("max_len {max_len} < k {k}")));
    }
    if k + 3 >= 40 {
        return Err(Error::ResourceLimit(
            "right side 2^(k+3) beyond desk scale".into(),
        ));
    }
    let right_len = (k + 3) as usize;
    let right_count: u64 = 1 << right_len;
    let mut node_total: u64 = 0;
    for len in k..=max_len {
        if len >= 63 {
            return Err(Error::ResourceLimit(format!(
                "left universe up to length {max_len} exceeds node cap {node_cap}"
            )));
        }
        node_total = node_total.saturating_add(1u64 << len);
        if node_total > node_cap {
            return Err(Error::ResourceLimit(format!(
                "left universe up to length {max_len} exceeds node cap {node_cap}"
            )));
        }
    }
    let mut rows = Vec::with_capacity(node_total as usize);
    for len in k..=max_len {
        for x in BitString::all_of_length(len as usize) {
            let degree = (len as u64 + 3).min(right_count);
            let nbrs = if degree == right_count {
                (0..right_count)
                    .map(|v| BitString::from_value(v as u128, right_len))
                    .collect()
            } else {
                let mut rng = substream(seed, &x);
                sample_distinct_rights(&mut rng, right_count, right_len, degree as u32)?
            };
            rows.push((x, nbrs));
        }
    }
    BitGraph::new(right_len, rows)
}

/// Outcome of a verification run.
#[derive(Clone, Debug)]
pub enum Verdict {
    Pass,
    Fail(ExpansionWitness),
    /// Sampling found nothing; explicitly not a proof.
    Unknown {
        trials: u64,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// A violating left set together with its full neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionWitness {
    pub left_set: Vec<BitString>,
    pub neighborhood: BTreeSet<BitString>,
    pub k: u64,
    pub k_prime: u64,
}

impl ExpansionWitness {
    /// Re-checks the witness against the graph, independently of how it
    /// was found.
    pub fn verify(&self, g: &BitGraph) -> bool {
        if self.left_set.len() as u64 != self.k {
            return false;
        }
        let distinct: HashSet<&BitString> = self.left_set.iter().collect();
        if distinct.len() != self.left_set.len() {
            return false;
        }
        let mut nbhd = BTreeSet::new();
        for x in &self.left_set {
            match g.neighbors(x) {
                Ok(nbrs) => nbhd.extend(nbrs.iter().cloned()),
                Err(_) => return false,
            }
        }
        nbhd == self.neighborhood && (nbhd.len() as u64) < self.k_prime
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Mask(Vec<u64>);

impl Mask {
    fn empty(blocks: usize) -> Self {
        Mask(vec![0; blocks])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn is_subset_of(&self, other: &Mask) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn union(&self, other: &Mask) -> Mask {
        Mask(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct DualEnumeration<'g> {
    g: &'g BitGraph,
    nbr_masks: Vec<Mask>,
}

impl<'g> DualEnumeration<'g> {
    fn new(g: &'g BitGraph) -> Self {
        let rights: Vec<BitString> = g.distinct_right_nodes().into_iter().collect();
        let index: std::collections::HashMap<&BitString, usize> =
            rights.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let blocks = rights.len().div_ceil(64);
        let nbr_masks = (0..g.left_count())
            .map(|i| {
                let mut m = Mask::empty(blocks.max(1));
                for p in g.neighbors_at(i) {
                    m.set(index[p]);
                }
                m
            })
            .collect();
        DualEnumeration { g, nbr_masks }
    }

    /// Enumerates every union of left neighborhoods with at most `b_max`
    /// elements. Whenever `violated(hosted, |B|)` yields a witness size,
    /// the hosted nodes form a violating left set; the least witness over
    /// the whole enumeration is reported so parallel partitions of this
    /// search could never disagree.
    fn search(
        &self,
        b_max: i64,
        violated: impl Fn(usize, usize) -> Option<usize>,
        meter: &mut WorkMeter,
        witness_params: impl Fn(usize) -> (u64, u64),
    ) -> Result<Option<ExpansionWitness>> {
        if b_max < 0 {
            return Ok(None);
        }
        let b_max = b_max as usize;
        let blocks = self.nbr_masks.first().map(|m| m.0.len()).unwrap_or(1);
        let mut visited: HashSet<Mask> = HashSet::new();
        let mut stack = vec![Mask::empty(blocks)];
        visited.insert(stack[0].clone());
        let mut best: Option<ExpansionWitness> = None;
        while let Some(b) = stack.pop() {
            meter.charge(self.g.left_count().max(1) as u64)?;
            let b_size = b.count();
            let mut hosted: Vec<usize> = Vec::new();
            for (i, m) in self.nbr_masks.iter().enumerate() {
                if m.is_subset_of(&b) {
                    hosted.push(i);
                } else {
                    let u = m.union(&b);
                    if u.count() <= b_max && !visited.contains(&u) {
                        visited.insert(u.clone());
                        stack.push(u);
                    }
                }
            }
            if let Some(needed) = violated(hosted.len(), b_size) {
                let mut left_set: Vec<BitString> = hosted[..needed]
                    .iter()
                    .map(|&i| self.g.left_nodes()[i].clone())
                    .collect();
                left_set.sort_by(BitString::length_lex_cmp);
                let mut neighborhood = BTreeSet::new();
                for x in &left_set {
                    neighborhood.extend(self.g.neighbors(x).unwrap().iter().cloned());
                }
                let (k, k_prime) = witness_params(needed);
                let witness = ExpansionWitness {
                    left_set,
                    neighborhood,
                    k,
                    k_prime,
                };
                let better = match &best {
                    None => true,
                    Some(b) => witness.left_set < b.left_set,
                };
                if better {
                    best = Some(witness);
                }
            }
        }
        Ok(best)
    }
}

/// Exact (K,K')-expansion check via the pruned dual enumeration. PASS
/// means every set of K left nodes has at least K' distinct neighbors;
/// FAIL carries a violating set. Work is metered per candidate
/// neighborhood union; exceeding `work_budget` asks the caller to fall
/// back to [`verify_expansion_sampled`].
pub fn verify_expansion_exact(
    g: &BitGraph,
    k: u64,
    k_prime: u64,
    work_budget: u64,
) -> Result<Verdict> {
    if k == 0 {
        return Ok(Verdict::Pass);
    }
    if (g.left_count() as u64) < k {
        return Ok(Verdict::Pass);
    }
    let mut meter = WorkMeter::new(work_budget);
    let dual = DualEnumeration::new(g);
    let witness = dual.search(
        k_prime as i64 - 1,
        |hosted, _| {
            if hosted as u64 >= k {
                Some(k as usize)
            } else {
                None
            }
        },
        &mut meter,
        |_| (k, k_prime),
    )?;
    Ok(match witness {
        Some(w) => Verdict::Fail(w),
        None => Verdict::Pass,
    })
}

/// (t,t)-expansion for every t <= K, in one shared enumeration. PASS
/// certifies offline matchability of every left set of size up to K.
pub fn verify_expansion_all_t(g: &BitGraph, k: u64, work_budget: u64) -> Result<Verdict> {
    if k == 0 {
        return Ok(Verdict::Pass);
    }
    let mut meter = WorkMeter::new(work_budget);
    let dual = DualEnumeration::new(g);
    let witness = dual.search(
        (k as i64 - 1).min(g.left_count() as i64),
        |hosted, b_size| {
            if hosted > b_size && (b_size as u64) < k {
                Some(b_size + 1)
            } else {
                None
            }
        },
        &mut meter,
        |needed| (needed as u64, needed as u64),
    )?;
    Ok(match witness {
        Some(w) => Verdict::Fail(w),
        None => Verdict::Pass,
    })
}

/// Monte Carlo falsifier: samples `trials` random left K-sets plus one
/// deterministic greedily-collapsed set (grown by minimum neighborhood
/// increase) and reports a witness if any violates (K,K')-expansion.
/// A clean run is explicitly not a proof.
pub fn verify_expansion_sampled(
    g: &BitGraph,
    k: u64,
    k_prime: u64,
    trials: u64,
    seed: u64,
) -> Verdict {
    if k == 0 || (g.left_count() as u64) < k {
        return Verdict::Unknown { trials: 0 };
    }
    let check = |indices: &[usize]| -> Option<ExpansionWitness> {
        let mut neighborhood = BTreeSet::new();
        for &i in indices {
            neighborhood.extend(g.neighbors_at(i).iter().cloned());
        }
        if (neighborhood.len() as u64) < k_prime {
            let mut left_set: Vec<BitString> =
                indices.iter().map(|&i| g.left_nodes()[i].clone()).collect();
            left_set.sort_by(BitString::length_lex_cmp);
            Some(ExpansionWitness {
                left_set,
                neighborhood,
                k,
                k_prime,
            })
        } else {
            None
        }
    };

    if let Some(w) = check(&greedy_collapsed_set(g, k as usize)) {
        return Verdict::Fail(w);
    }
    let mut rng = SplitMix64::new(seed);
    for _ in 0..trials {
        let indices: Vec<usize> = rng
            .distinct_sorted(g.left_count() as u64, k as usize)
            .into_iter()
            .map(|v| v as usize)
            .collect();
        if let Some(w) = check(&indices) {
            return Verdict::Fail(w);
        }
    }
    Verdict::Unknown { trials }
}

/// Grows a set from the minimum-degree node, each step adding the node
/// that increases the combined neighborhood least. Collision-heavy sets
/// surface violations a uniform sample would miss.
fn greedy_collapsed_set(g: &BitGraph, size: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    let mut nbhd: HashSet<BitString> = HashSet::new();
    let mut remaining: Vec<usize> = (0..g.left_count()).collect();
    while chosen.len() < size {
        let next = remaining
            .iter()
            .copied()
            .min_by_key(|&i| {
                let added = g
                    .neighbors_at(i)
                    .iter()
                    .filter(|p| !nbhd.contains(*p))
                    .count();
                (added, i)
            })
            .unwrap();
        chosen.push(next);
        nbhd.extend(g.neighbors_at(next).iter().cloned());
        remaining.retain(|&i| i != next);
    }
    chosen.sort_unstable();
    chosen
}

/// Tagged disjoint copies of a base graph: `spec.copies` copies with
/// fixed-width numeric tags, so the right length grows by ceil(log2 t).
/// With t = 1 the tag is empty and the base comes back unchanged. Whether
/// the base was actually verified as a disperser is the caller's record;
/// this operation only performs the union.
pub fn amplify(base: &BitGraph, spec: &DisperserSpec) -> Result<BitGraph> {
    let t = spec.copies;
    if t == 0 {
        return Err(Error::InvalidCopies(0));
    }
    if t > 1 << 20 {
        return Err(Error::ResourceLimit(format!(
            "copy count {t} beyond desk scale"
        )));
    }
    let tag_width = if t == 1 {
        0
    } else {
        64 - (t - 1).leading_zeros() as usize
    };
    let copies: Vec<BitGraph> = std::iter::repeat_n(base.clone(), t as usize).collect();
    let tags: Vec<BitString> = (0..t)
        .map(|i| BitString::from_value(i as u128, tag_width))
        .collect();
    disjoint_union(&copies, &tags)
}

/// Scans seeds from `start_seed` until a generated graph passes the all-t
/// check, returning the graph and the seed that produced it.
pub fn find_verified_fixed_length(
    n: u32,
    k: u32,
    start_seed: u64,
    max_tries: u64,
    work_budget: u64,
) -> Result<(BitGraph, u64)> {
    for seed in start_seed..start_seed + max_tries {
        let g = gen_random_expander(&ExpanderSpec::fixed_length(n, k, seed)?)?;
        if verify_expansion_all_t(&g, 1 << k, work_budget)?.is_pass() {
            return Ok((g, seed));
        }
    }
    Err(Error::GenerationFailure(format!(
        "no verified ({n},{k}) expander within {max_tries} seeds from {start_seed}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::DEFAULT_WORK_BUDGET;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    fn complete(n_left: usize, right_len: usize) -> BitGraph {
        let rights: Vec<BitString> = BitString::all_of_length(right_len).collect();
        let lefts = BitString::all_of_length(n_left);
        BitGraph::new(right_len, lefts.map(|x| (x, rights.clone())).collect()).unwrap()
    }

    #[test]
    fn fixed_length_spec_shape() {
        let spec = ExpanderSpec::fixed_length(6, 2, 7).unwrap();
        assert_eq!((spec.right_len, spec.degree), (4, 7));
        assert!(ExpanderSpec::fixed_length(2, 2, 0).is_err());
    }

    #[test]
    fn generated_graph_has_uniform_degree() {
        let g = gen_random_expander(&ExpanderSpec::fixed_length(6, 2, 7).unwrap()).unwrap();
        assert_eq!(g.left_count(), 64);
        assert_eq!(g.right_len(), 4);
        for x in g.left_nodes() {
            assert_eq!(g.degree(x).unwrap(), 7);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ExpanderSpec::fixed_length(6, 2, 7).unwrap();
        let a = gen_random_expander(&spec).unwrap();
        let b = gen_random_expander(&spec).unwrap();
        assert_eq!(a.write_text(), b.write_text());
    }

    #[test]
    fn generation_fails_when_right_side_too_small() {
        let spec = ExpanderSpec {
            n: 3,
            k: 0,
            right_len: 1,
            degree: 4,
            seed: 0,
        };
        assert!(matches!(
            gen_random_expander(&spec),
            Err(Error::GenerationFailure(_))
        ));
    }

    #[test]
    fn generated_graph_round_trips_through_text() {
        let g = gen_random_expander(&ExpanderSpec::fixed_length(6, 2, 7).unwrap()).unwrap();
        let parsed = BitGraph::read_text(&g.write_text()).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn variable_length_degrees() {
        let g = gen_variable_length_expander(2, 4, 3, 1_000_000).unwrap();
        assert_eq!(g.right_len(), 5);
        let lens: Vec<usize> = g.left_nodes().iter().map(|x| x.len()).collect();
        assert_eq!(lens.iter().filter(|&&l| l == 2).count(), 4);
        assert_eq!(lens.iter().filter(|&&l| l == 4).count(), 16);
        for x in g.left_nodes() {
            assert_eq!(g.degree(x).unwrap(), x.len() + 3);
        }
    }

    #[test]
    fn variable_length_smallest_case() {
        let g = gen_variable_length_expander(1, 1, 0, 1_000).unwrap();
        assert_eq!(g.left_count(), 2);
        assert_eq!(g.right_len(), 4);
        for x in g.left_nodes() {
            assert_eq!(g.degree(x).unwrap(), 4);
        }
    }

    #[test]
    fn variable_length_node_cap() {
        assert!(matches!(
            gen_variable_length_expander(2, 40, 0, 1_000_000),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn variable_length_long_nodes_get_full_right_side() {
        // k=0: right side has 8 nodes; nodes longer than 8 take all of it.
        let g = gen_variable_length_expander(0, 9, 1, 1_100_000).unwrap();
        let long = bs("101010101");
        assert_eq!(g.degree(&long).unwrap(), 8);
    }

    #[test]
    fn exact_pass_on_complete_graph() {
        let g = complete(3, 3);
        assert!(verify_expansion_exact(&g, 4, 4, DEFAULT_WORK_BUDGET)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn exact_witness_on_forced_collision() {
        let g = BitGraph::new(
            2,
            vec![(bs("0"), vec![bs("00")]), (bs("1"), vec![bs("00")])],
        )
        .unwrap();
        match verify_expansion_exact(&g, 2, 2, DEFAULT_WORK_BUDGET).unwrap() {
            Verdict::Fail(w) => {
                assert_eq!(w.left_set, vec![bs("0"), bs("1")]);
                assert!(w.verify(&g));
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn exact_pass_on_generated_fixed_length_seed7() {
        let g = gen_random_expander(&ExpanderSpec::fixed_length(6, 2, 7).unwrap()).unwrap();
        assert!(verify_expansion_exact(&g, 4, 4, DEFAULT_WORK_BUDGET)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn all_t_pass_on_complete_graph() {
        let g = complete(3, 3);
        assert!(verify_expansion_all_t(&g, 8, DEFAULT_WORK_BUDGET)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn all_t_witness_on_star() {
        let rows = BitString::all_of_length(3)
            .map(|x| (x, vec![bs("00")]))
            .collect();
        let g = BitGraph::new(2, rows).unwrap();
        match verify_expansion_all_t(&g, 2, DEFAULT_WORK_BUDGET).unwrap() {
            Verdict::Fail(w) => {
                assert_eq!(w.left_set.len(), 2);
                assert!(w.verify(&g));
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn all_t_pass_on_variable_length_graph() {
        // Fixed passing seed for the k=2, max_len=5 family.
        let g = gen_variable_length_expander(2, 5, 0, 1_000_000).unwrap();
        assert!(verify_expansion_all_t(&g, 4, DEFAULT_WORK_BUDGET)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn exact_isolated_nodes_are_expansion_failures() {
        let g = BitGraph::new(2, vec![(bs("0"), vec![]), (bs("1"), vec![bs("01")])]).unwrap();
        match verify_expansion_exact(&g, 1, 1, DEFAULT_WORK_BUDGET).unwrap() {
            Verdict::Fail(w) => {
                assert_eq!(w.left_set, vec![bs("0")]);
                assert!(w.verify(&g));
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn work_budget_exceeded_surfaces() {
        let g = complete(4, 4);
        assert!(matches!(
            verify_expansion_exact(&g, 8, 8, 3),
            Err(Error::WorkBudgetExceeded { .. })
        ));
    }

    #[test]
    fn sampled_no_violation_on_complete_graph() {
        let g = complete(3, 3);
        match verify_expansion_sampled(&g, 4, 4, 100, 1) {
            Verdict::Unknown { trials } => assert_eq!(trials, 100),
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    fn sampled_finds_forced_collision() {
        let g = BitGraph::new(
            2,
            vec![(bs("0"), vec![bs("00")]), (bs("1"), vec![bs("00")])],
        )
        .unwrap();
        assert!(matches!(
            verify_expansion_sampled(&g, 2, 2, 100, 9),
            Verdict::Fail(_)
        ));
    }

    #[test]
    fn sampled_clean_on_fixed_length_n10() {
        let g = gen_random_expander(&ExpanderSpec::fixed_length(10, 4, 11).unwrap()).unwrap();
        match verify_expansion_sampled(&g, 16, 16, 10_000, 2) {
            Verdict::Unknown { trials } => assert_eq!(trials, 10_000),
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    fn sampled_agrees_with_exact_when_both_definite() {
        let g = BitGraph::new(
            2,
            vec![
                (bs("00"), vec![bs("00")]),
                (bs("01"), vec![bs("00")]),
                (bs("10"), vec![bs("01"), bs("10")]),
            ],
        )
        .unwrap();
        let exact = verify_expansion_exact(&g, 2, 2, DEFAULT_WORK_BUDGET).unwrap();
        let sampled = verify_expansion_sampled(&g, 2, 2, 200, 3);
        match (exact, sampled) {
            (Verdict::Fail(we), Verdict::Fail(ws)) => {
                assert!(we.verify(&g));
                assert!(ws.verify(&g));
            }
            other => panic!("expected two failures, got {other:?}"),
        }
    }

    #[test]
    fn amplify_t1_is_identity() {
        let g = complete(2, 2);
        let out = amplify(&g, &DisperserSpec::with_copies(1)).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn amplify_t4_grows_rights_and_degrees() {
        let g = complete(2, 4); // 16 right nodes
        let out = amplify(&g, &DisperserSpec::with_copies(4)).unwrap();
        assert_eq!(out.right_len(), 6);
        assert_eq!(out.distinct_right_nodes().len(), 64);
        for x in out.left_nodes() {
            assert_eq!(out.degree(x).unwrap(), 4 * g.degree(x).unwrap());
        }
    }

    #[test]
    fn amplify_of_verified_base_still_verifies() {
        let mut found = None;
        for seed in 0..50 {
            let g = gen_random_expander(&ExpanderSpec::fixed_length(5, 2, seed).unwrap()).unwrap();
            if verify_expansion_exact(&g, 4, 8, DEFAULT_WORK_BUDGET)
                .unwrap()
                .is_pass()
            {
                found = Some(g);
                break;
            }
        }
        let g = found.expect("some seed below 50 yields a (4,8)-expander on 16 rights");
        let out = amplify(&g, &DisperserSpec::with_copies(1)).unwrap();
        assert!(verify_expansion_exact(&out, 4, 4, DEFAULT_WORK_BUDGET)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn amplify_rejects_zero_copies() {
        let g = complete(2, 2);
        assert!(matches!(
            amplify(&g, &DisperserSpec::with_copies(0)),
            Err(Error::InvalidCopies(0))
        ));
    }

    #[test]
    fn disperser_spec_copy_count() {
        let spec = DisperserSpec::for_amplification(8, 16, 0.5, 256, 1.0).unwrap();
        assert_eq!(spec.copies, 4);
        let spec = DisperserSpec::for_amplification(2, 4, 0.5, 1_000_000, 1.0).unwrap();
        assert_eq!(spec.copies, 1);
    }

    #[test]
    fn find_verified_returns_passing_seed() {
        let (g, seed) = find_verified_fixed_length(6, 2, 0, 64, DEFAULT_WORK_BUDGET).unwrap();
        assert!(verify_expansion_all_t(&g, 4, DEFAULT_WORK_BUDGET)
            .unwrap()
            .is_pass());
        assert!(seed < 64);
    }
}
