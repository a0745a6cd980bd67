//! Distinguishing machinery: low-congestion neighbor selection, prime
//! residue splitting, and the composed split graph whose right nodes are
//! (base hash, residue, prime) triples. For a set S of at most 2^k left
//! nodes, all but an eps fraction keep a composite neighbor no other
//! member of S touches — that neighbor is a unique short certificate.
//!
//! Strings are read as big-endian natural numbers throughout (the empty
//! string is 0).

use std::collections::BTreeMap;

use crate::bitgraph::BitGraph;
use crate::bits::BitString;
use crate::error::Error;
use crate::Result;

/// Simple sieve of Eratosthenes, cached per build.
#[derive(Clone, Debug)]
pub struct PrimeSieve {
    cap: u64,
    primes: Vec<u64>,
}

impl PrimeSieve {
    pub fn up_to(cap: u64) -> Result<Self> {
        if cap > 10_000_000 {
            return Err(Error::ResourceLimit(format!(
                "prime sieve cap {cap} beyond desk scale"
            )));
        }
        let n = cap as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for p in 2..=n {
            if !composite[p] {
                primes.push(p as u64);
                let mut q = p * p;
                while q <= n {
                    composite[q] = true;
                    q += p;
                }
            }
        }
        Ok(PrimeSieve { cap, primes })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn count(&self) -> usize {
        self.primes.len()
    }

    pub fn is_prime(&self, q: u64) -> bool {
        self.primes.binary_search(&q).is_ok()
    }
}

/// Per-right-node counts of neighbors inside the active set S. A right
/// node is fat when its count exceeds D/eps for D the maximum degree
/// over S.
#[derive(Clone, Debug)]
pub struct CongestionProfile {
    pub counts: BTreeMap<BitString, usize>,
    pub max_degree: usize,
    pub eps: f64,
    pub fat_threshold: f64,
    pub total_edges: usize,
}

impl CongestionProfile {
    pub fn is_fat(&self, p: &BitString) -> bool {
        self.counts
            .get(p)
            .map(|&c| c as f64 > self.fat_threshold)
            .unwrap_or(false)
    }

    pub fn fat_nodes(&self) -> Vec<&BitString> {
        self.counts
            .iter()
            .filter(|(_, &c)| c as f64 > self.fat_threshold)
            .map(|(p, _)| p)
            .collect()
    }
}

pub fn congestion_profile(g: &BitGraph, s: &[BitString], eps: f64) -> Result<CongestionProfile> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidSpec(format!("eps {eps} not in (0,1]")));
    }
    let mut counts: BTreeMap<BitString, usize> = BTreeMap::new();
    let mut max_degree = 0;
    let mut total_edges = 0;
    for x in s {
        let nbrs = g.neighbors(x)?;
        max_degree = max_degree.max(nbrs.len());
        total_edges += nbrs.len();
        for p in nbrs {
            *counts.entry(p.clone()).or_insert(0) += 1;
        }
    }
    let fat_threshold = max_degree as f64 / eps;
    Ok(CongestionProfile {
        counts,
        max_degree,
        eps,
        fat_threshold,
        total_edges,
    })
}

/// For each member of S, its first non-fat neighbor in stored order (or
/// none), together with the congestion profile.
pub fn low_congestion_select(
    g: &BitGraph,
    s: &[BitString],
    eps: f64,
) -> Result<(BTreeMap<BitString, Option<BitString>>, CongestionProfile)> {
    let profile = congestion_profile(g, s, eps)?;
    let mut picks = BTreeMap::new();
    for x in s {
        let pick = g.neighbors(x)?.iter().find(|p| !profile.is_fat(p)).cloned();
        picks.insert(x.clone(), pick);
    }
    Ok((picks, profile))
}

/// The least prime q <= cap whose residue distinguishes x from every
/// other member of W. With |W| = d strings of length n, such a prime
/// exists below 4 d n^2.
pub fn find_splitting_prime(x: &BitString, w: &[BitString], cap: u64) -> Result<u64> {
    if !w.contains(x) {
        return Err(Error::InvalidSpec(format!("{x} is not a member of W")));
    }
    let sieve = PrimeSieve::up_to(cap)?;
    find_splitting_prime_with(&sieve, x, w)
}

/// Same scan against a prebuilt sieve.
pub fn find_splitting_prime_with(
    sieve: &PrimeSieve,
    x: &BitString,
    w: &[BitString],
) -> Result<u64> {
    for &q in sieve.primes() {
        let r = x.value_mod(q);
        if w.iter().all(|y| y == x || y.value_mod(q) != r) {
            return Ok(q);
        }
    }
    Err(Error::NoPrimeFound {
        cap: sieve.cap(),
        x: x.to_string(),
    })
}

/// A composite right node owned by one left node: no other member of the
/// active set is adjacent to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCertificate {
    pub owner: BitString,
    pub p: BitString,
    pub a: u64,
    pub q: u64,
}

impl SplitCertificate {
    /// Independent re-verification against the build and the active set.
    pub fn verify(&self, build: &SplitBuild, s: &[BitString]) -> bool {
        if !build.sieve.is_prime(self.q) || self.q > build.cap {
            return false;
        }
        if self.owner.value_mod(self.q) != self.a {
            return false;
        }
        let Ok(base_nbrs) = build.base.neighbors(&self.owner) else {
            return false;
        };
        if !base_nbrs.contains(&self.p) {
            return false;
        }
        s.iter().filter(|y| *y != &self.owner).all(|y| {
            !build
                .base
                .neighbors(y)
                .map(|nbrs| nbrs.contains(&self.p) && y.value_mod(self.q) == self.a)
                .unwrap_or(false)
        })
    }

    /// The composite right node ⟨p, a, q⟩ in the split graph encoding.
    pub fn right_node(&self, build: &SplitBuild) -> BitString {
        build.encode_right(&self.p, self.a, self.q)
    }
}

/// The split graph plus the arithmetic needed to read its right nodes.
pub struct SplitBuild {
    pub graph: BitGraph,
    pub base: BitGraph,
    pub n: u32,
    pub k: u32,
    pub eps: f64,
    /// Congestion cap d = ceil(max base degree / eps) recorded at build.
    pub d: u64,
    /// Prime/residue bound 4 d n^2.
    pub cap: u64,
    /// Field width: a and q are encoded big-endian in this many bits.
    pub width: usize,
    pub sieve: PrimeSieve,
}

impl SplitBuild {
    pub fn encode_right(&self, p: &BitString, a: u64, q: u64) -> BitString {
        p.concat(&BitString::from_value(a as u128, self.width))
            .concat(&BitString::from_value(q as u128, self.width))
    }

    /// Splits a composite right node back into (p, a, q).
    pub fn decode_right(&self, node: &BitString) -> Result<(BitString, u64, u64)> {
        let base_len = self.base.right_len();
        if node.len() != base_len + 2 * self.width {
            return Err(Error::ShapeMismatch(format!(
                "composite node has length {}, expected {}",
                node.len(),
                base_len + 2 * self.width
            )));
        }
        let p = BitString::from_bits(&node.bits()[..base_len]);
        let a = BitString::from_bits(&node.bits()[base_len..base_len + self.width])
            .value()
            .unwrap() as u64;
        let q = BitString::from_bits(&node.bits()[base_len + self.width..])
            .value()
            .unwrap() as u64;
        Ok((p, a, q))
    }
}

/// Builds the composed graph: x is connected to ⟨p, a, q⟩ for each base
/// neighbor p and each prime q <= 4dn^2, where a = x mod q. Only
/// realizable composite nodes are materialized; the abstract right
/// universe keeps width base_right_len + 2*ceil(log2(4dn^2)) for length
/// accounting.
pub fn build_split_graph(base: &BitGraph, n: u32, k: u32, eps: f64) -> Result<SplitBuild> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidSpec(format!("eps {eps} not in (0,1]")));
    }
    if let Some(bad) = base.left_nodes().iter().find(|x| x.len() != n as usize) {
        return Err(Error::ShapeMismatch(format!(
            "left node {bad} does not have length n={n}"
        )));
    }
    let d = ((base.max_degree() as f64) / eps).ceil() as u64;
    if d == 0 {
        return Err(Error::ShapeMismatch("base graph has no edges".into()));
    }
    let cap = 4 * d * (n as u64) * (n as u64);
    if cap < 2 {
        return Err(Error::WidthOverflow(format!(
            "cap 4dn^2 = {cap} leaves no prime to use"
        )));
    }
    let width = 64 - (cap - 1).leading_zeros() as usize;
    if width > 40 {
        return Err(Error::WidthOverflow(format!(
            "field width {width} beyond desk scale"
        )));
    }
    let sieve = PrimeSieve::up_to(cap)?;
    let mut rows = Vec::with_capacity(base.left_count());
    for x in base.left_nodes() {
        let mut nbrs = Vec::new();
        for p in base.neighbors(x)? {
            for &q in sieve.primes() {
                let a = x.value_mod(q);
                nbrs.push(
                    p.concat(&BitString::from_value(a as u128, width))
                        .concat(&BitString::from_value(q as u128, width)),
                );
            }
        }
        rows.push((x.clone(), nbrs));
    }
    let graph = BitGraph::new(base.right_len() + 2 * width, rows)?;
    Ok(SplitBuild {
        graph,
        base: base.clone(),
        n,
        k,
        eps,
        d,
        cap,
        width,
        sieve,
    })
}

/// Finds a composite neighbor of x with no other neighbor in S, scanning
/// primes in increasing order and base neighbors in stored order, so ties
/// break toward least q then earliest p.
pub fn certify_unique(
    build: &SplitBuild,
    s: &[BitString],
    x: &BitString,
) -> Result<Option<SplitCertificate>> {
    if !s.contains(x) {
        return Err(Error::InvalidSpec(format!("{x} is not a member of S")));
    }
    let base_nbrs = build.base.neighbors(x)?;
    for &q in build.sieve.primes() {
        let a = x.value_mod(q);
        for p in base_nbrs {
            let taken = s.iter().any(|y| {
                y != x
                    && y.value_mod(q) == a
                    && build
                        .base
                        .neighbors(y)
                        .map(|nbrs| nbrs.contains(p))
                        .unwrap_or(false)
            });
            if !taken {
                return Ok(Some(SplitCertificate {
                    owner: x.clone(),
                    p: p.clone(),
                    a,
                    q,
                }));
            }
        }
    }
    Ok(None)
}
