//! The cascade matcher: one greedy level per length class, each level a
//! tagged union of copies of a base expander, with disjoint right
//! namespaces. A request (x,k) with k >= n takes a reserved self node;
//! otherwise it is offered to level k and descends level by level on
//! rejection. With verified (2^(j),2^(j))-expander bases, a compliant
//! stream (at most 2^k distinct pairs per class k) is always served: level
//! k sees at most 2^(k+1) inputs and rejects at most 2^(k-1) of them.
//!
//! Right-node layout: level hashes are marker bit 0, then a copy tag
//! (2 bits for the four-copy levels, 1 bit for the two-copy bottom level),
//! then the base right node, giving length k + c + 2 at level k for a base
//! family with right length j + c. Self hashes are marker bit 1 followed
//! by x. Levels are checked to have pairwise distinct hash lengths.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::bitgraph::{disjoint_union, BitGraph};
use crate::bits::BitString;
use crate::error::Error;
use crate::Result;

use super::{MatchRequest, RequestOutcome, Transcript, TranscriptEntry};

pub struct CascadeLevel {
    pub k: u32,
    /// Tagged union of base copies, marker prefix included.
    pub graph: BitGraph,
    used: HashSet<BitString>,
}

impl CascadeLevel {
    /// Hashes consumed at this level so far.
    pub fn used_count(&self) -> usize {
        self.used.len()
    }

    fn try_match(&mut self, x: &BitString) -> Result<Option<BitString>> {
        let pick = self
            .graph
            .neighbors(x)?
            .iter()
            .find(|p| !self.used.contains(*p))
            .cloned();
        if let Some(p) = &pick {
            self.used.insert(p.clone());
        }
        Ok(pick)
    }
}

/// Where a request was served.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchedAt {
    SelfNode,
    Level(u32),
    /// Idempotent repeat of an already-served (x,k) pair.
    Repeat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CascadeOutcome {
    Matched {
        hash: BitString,
        at: MatchedAt,
        over_budget: bool,
    },
    /// Every level rejected. Only reachable on over-budget requests; an
    /// in-budget exhaustion is a guarantee breach and surfaces as an error.
    Exhausted,
}

/// The monotone protocol state: an injective hash -> left-node map that
/// never revokes an assignment, the hashes held per left node (one per
/// distinct class it was requested with), the pair -> hash memo behind
/// idempotent repeats, and the transcript.
#[derive(Default)]
pub struct MatchingState {
    assigned: BTreeMap<BitString, BitString>,
    per_left: BTreeMap<BitString, Vec<BitString>>,
    served: BTreeMap<(BitString, u32), BitString>,
    transcript: Transcript,
}

impl MatchingState {
    pub fn new() -> Self {
        MatchingState::default()
    }

    /// The hash -> left node assignment so far.
    pub fn assigned(&self) -> &BTreeMap<BitString, BitString> {
        &self.assigned
    }

    pub fn hashes_of(&self, x: &BitString) -> &[BitString] {
        self.per_left.get(x).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn served_hash(&self, x: &BitString, k: u32) -> Option<&BitString> {
        self.served.get(&(x.clone(), k))
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    fn record(&mut self, x: &BitString, k: u32, outcome: RequestOutcome, levels_tried: Vec<u32>) {
        self.transcript.push(TranscriptEntry {
            x: x.clone(),
            k: Some(k),
            outcome,
            levels_tried,
        });
    }

    fn assign(&mut self, hash: BitString, x: &BitString, k: u32) -> Result<()> {
        match self.assigned.get(&hash) {
            Some(owner) if owner != x => {
                return Err(Error::CrossFamilyCollision {
                    hash: hash.to_string(),
                    existing: owner.to_string(),
                })
            }
            Some(_) => {}
            None => {
                self.assigned.insert(hash.clone(), x.clone());
                self.per_left
                    .entry(x.clone())
                    .or_default()
                    .push(hash.clone());
            }
        }
        self.served.insert((x.clone(), k), hash);
        Ok(())
    }
}

pub struct CascadeMatcher {
    n: u32,
    levels: Vec<CascadeLevel>,
    state: MatchingState,
    pairs_per_class: BTreeMap<u32, u64>,
    overhead_const: u32,
}

/// Builds the cascade from a family of base expanders keyed by capacity
/// exponent j, where family[j] is intended to be a (2^j,2^j)-expander with
/// a common left set of n-bit nodes. Level j+1 is the four-copy union of
/// family[j]; the bottom level j_lo is a two-copy union of family[j_lo] so
/// that class-j_lo requests (and strays rejected above) are servable.
/// Keys must be contiguous. `c_slack` allows the per-member overhead
/// right_len - j to exceed the family minimum by at most that much.
pub fn build_cascade(
    family: &BTreeMap<u32, BitGraph>,
    n: u32,
    c_slack: u32,
) -> Result<CascadeMatcher> {
    if n >= 26 {
        return Err(Error::ResourceLimit(format!(
            "left universe 2^{n} is beyond desk scale"
        )));
    }
    let mut levels = Vec::new();
    if !family.is_empty() {
        let keys: Vec<u32> = family.keys().copied().collect();
        for w in keys.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::InvalidSpec(format!(
                    "family keys must be contiguous, missing j={}",
                    w[0] + 1
                )));
            }
        }
        let base_left = family[&keys[0]].left_nodes();
        if let Some(bad) = base_left.iter().find(|x| x.len() != n as usize) {
            return Err(Error::MismatchedLeftSets(format!(
                "left node {bad} does not have length n={n}"
            )));
        }
        let c_min = keys
            .iter()
            .map(|j| (family[j].right_len() as u32).saturating_sub(*j))
            .min()
            .unwrap();
        for j in &keys {
            let g = &family[j];
            if g.left_nodes() != base_left {
                return Err(Error::MismatchedLeftSets(format!(
                    "family member j={j} has a different left set"
                )));
            }
            let c_j = (g.right_len() as u32).saturating_sub(*j);
            if c_j > c_min + c_slack {
                return Err(Error::InvalidSpec(format!(
                    "family member j={j} overhead {c_j} exceeds min {c_min} + slack {c_slack}"
                )));
            }
        }
        let marker = BitString::from_bits(&[0]);
        let j_lo = keys[0];
        let two_tags: Vec<BitString> = (0..2).map(|i| BitString::from_value(i, 1)).collect();
        let bottom = disjoint_union(&[family[&j_lo].clone(), family[&j_lo].clone()], &two_tags)?;
        levels.push(CascadeLevel {
            k: j_lo,
            graph: disjoint_union(std::slice::from_ref(&bottom), std::slice::from_ref(&marker))?,
            used: HashSet::new(),
        });
        let four_tags: Vec<BitString> = (0..4).map(|i| BitString::from_value(i, 2)).collect();
        for j in &keys {
            let base = &family[j];
            let four = disjoint_union(
                &[base.clone(), base.clone(), base.clone(), base.clone()],
                &four_tags,
            )?;
            levels.push(CascadeLevel {
                k: j + 1,
                graph: disjoint_union(std::slice::from_ref(&four), std::slice::from_ref(&marker))?,
                used: HashSet::new(),
            });
        }
        let mut lens = BTreeSet::new();
        for level in &levels {
            if !lens.insert(level.graph.right_len()) {
                return Err(Error::InvalidSpec(format!(
                    "levels do not have pairwise distinct hash lengths (collision at {})",
                    level.graph.right_len()
                )));
            }
        }
    }
    let overhead_const = levels
        .iter()
        .map(|l| l.graph.right_len() as u32 - l.k)
        .max()
        .unwrap_or(0)
        .max(1); // the self branch contributes |1x| - k <= 1
    Ok(CascadeMatcher {
        n,
        levels,
        state: MatchingState::new(),
        pairs_per_class: BTreeMap::new(),
        overhead_const,
    })
}

impl CascadeMatcher {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Largest overhead |p| - k this matcher can produce.
    pub fn overhead_const(&self) -> u32 {
        self.overhead_const
    }

    pub fn levels(&self) -> &[CascadeLevel] {
        &self.levels
    }

    /// Lowest and highest servable class below n, when levels exist.
    pub fn class_range(&self) -> Option<(u32, u32)> {
        match (self.levels.first(), self.levels.last()) {
            (Some(lo), Some(hi)) => Some((lo.k, hi.k)),
            _ => None,
        }
    }

    pub fn state(&self) -> &MatchingState {
        &self.state
    }

    pub fn transcript(&self) -> &Transcript {
        self.state.transcript()
    }

    /// The final hash -> left node assignment.
    pub fn assignment(&self) -> &BTreeMap<BitString, BitString> {
        self.state.assigned()
    }

    pub fn hashes_of(&self, x: &BitString) -> &[BitString] {
        self.state.hashes_of(x)
    }

    /// The hash previously assigned to the exact pair (x,k), if any.
    pub fn served_hash(&self, x: &BitString, k: u32) -> Option<&BitString> {
        self.state.served_hash(x, k)
    }

    /// The reserved self hash for x: marker bit 1 followed by x.
    pub fn self_hash(x: &BitString) -> BitString {
        BitString::from_bits(&[1]).concat(x)
    }

    /// All potential hashes for x in deterministic order: each level's
    /// neighbor list ascending by level, then the reserved self node.
    pub fn list_neighbors(&self, x: &BitString) -> Result<Vec<BitString>> {
        if x.len() != self.n as usize {
            return Err(Error::UnknownLeftNode(x.to_string()));
        }
        let mut out = Vec::new();
        for level in &self.levels {
            out.extend(level.graph.neighbors(x)?.iter().cloned());
        }
        out.push(Self::self_hash(x));
        Ok(out)
    }

    fn class_budget(k: u32) -> u64 {
        if k >= 63 {
            u64::MAX
        } else {
            1 << k
        }
    }

    /// Serves one request. Identical (x,k) repeats return the previously
    /// assigned hash without consuming anything. Over-budget requests are
    /// flagged and served best-effort.
    pub fn request(&mut self, req: &MatchRequest) -> Result<CascadeOutcome> {
        let MatchRequest { x, k } = req;
        let (x, k) = (x.clone(), *k);
        if x.len() != self.n as usize {
            return Err(Error::UnknownLeftNode(x.to_string()));
        }
        if let Some(hash) = self.state.served_hash(&x, k) {
            let hash = hash.clone();
            self.state.record(
                &x,
                k,
                RequestOutcome::Matched { hash: hash.clone() },
                vec![],
            );
            return Ok(CascadeOutcome::Matched {
                hash,
                at: MatchedAt::Repeat,
                over_budget: false,
            });
        }
        let count = self.pairs_per_class.entry(k).or_insert(0);
        *count += 1;
        let over_budget = *count > Self::class_budget(k);

        if k >= self.n {
            let hash = Self::self_hash(&x);
            self.state.assign(hash.clone(), &x, k)?;
            let outcome = if over_budget {
                RequestOutcome::BudgetViolation {
                    matched: Some(hash.clone()),
                }
            } else {
                RequestOutcome::Matched { hash: hash.clone() }
            };
            self.state.record(&x, k, outcome, vec![]);
            return Ok(CascadeOutcome::Matched {
                hash,
                at: MatchedAt::SelfNode,
                over_budget,
            });
        }

        let Some((k_lo, k_hi)) = self.class_range() else {
            return Err(Error::UnsupportedClass {
                k,
                supported: format!("only k >= {} (no levels were built)", self.n),
            });
        };
        if k < k_lo || k > k_hi {
            return Err(Error::UnsupportedClass {
                k,
                supported: format!("k in {k_lo}..={k_hi} and k >= {}", self.n),
            });
        }

        let mut tried = Vec::new();
        let mut found: Option<(BitString, u32)> = None;
        for level in self.levels.iter_mut().rev() {
            if level.k > k {
                continue;
            }
            tried.push(level.k);
            if let Some(hash) = level.try_match(&x)? {
                found = Some((hash, level.k));
                break;
            }
        }
        match found {
            Some((hash, at)) => {
                self.state.assign(hash.clone(), &x, k)?;
                let outcome = if over_budget {
                    RequestOutcome::BudgetViolation {
                        matched: Some(hash.clone()),
                    }
                } else {
                    RequestOutcome::Matched { hash: hash.clone() }
                };
                self.state.record(&x, k, outcome, tried);
                Ok(CascadeOutcome::Matched {
                    hash,
                    at: MatchedAt::Level(at),
                    over_budget,
                })
            }
            None if over_budget => {
                self.state.record(
                    &x,
                    k,
                    RequestOutcome::BudgetViolation { matched: None },
                    tried,
                );
                Ok(CascadeOutcome::Exhausted)
            }
            None => {
                self.state.record(&x, k, RequestOutcome::Rejected, tried);
                Err(Error::GuaranteeBreach {
                    x: x.to_string(),
                    k,
                })
            }
        }
    }
}
