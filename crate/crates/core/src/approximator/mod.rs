//! Program lists for a time-bounded toy machine.
//!
//! The pipeline: enumerate all programs up to a length cap in
//! length-then-lexicographic order (the stand-in for running them "in
//! parallel"), replay every halting (output, program-length) pair as a
//! matching request through a cascade family, and read off an injective
//! decoder hash -> output. The candidate list for a string x is then its
//! full cascade neighborhood, each entry wrapped with a decoder marker
//! bit; some entry is guaranteed to be a marker-wrapped hash of a
//! shortest-at-this-budget program for x, so its length is bounded by
//! that program's length plus the recorded overhead plus one.

mod machine;

pub use machine::{DefaultMachine, EvalResult, ToyMachine, DEFAULT_MACHINE_BUDGET};

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitString;
use crate::error::Error;
use crate::matching::{CascadeMatcher, MatchRequest};
use crate::Result;

/// Hard cap on program-table enumeration width.
const MAX_ENUMERABLE_LEN: u32 = 24;

/// All halting programs up to `max_prog_len`, in enumeration order.
#[derive(Clone, Debug)]
pub struct ProgramTable {
    pub max_prog_len: u32,
    pub budget: u64,
    pub condition: BitString,
    pub entries: Vec<(BitString, BitString)>,
}

/// Enumerates programs of length 0..=max_prog_len in
/// length-then-lexicographic order.
pub fn enumerate_programs(max_prog_len: u32) -> impl Iterator<Item = BitString> {
    (0..=max_prog_len as usize).flat_map(BitString::all_of_length)
}

pub fn program_table(
    machine: &dyn ToyMachine,
    condition: &BitString,
    budget: u64,
    max_prog_len: u32,
) -> Result<ProgramTable> {
    if max_prog_len > MAX_ENUMERABLE_LEN {
        return Err(Error::ResourceLimit(format!(
            "program enumeration up to length {max_prog_len} is beyond desk scale"
        )));
    }
    let entries = enumerate_programs(max_prog_len)
        .filter_map(|p| {
            machine
                .eval(&p, condition, budget)
                .halted()
                .cloned()
                .map(|out| (p, out))
        })
        .collect();
    Ok(ProgramTable {
        max_prog_len,
        budget,
        condition: condition.clone(),
        entries,
    })
}

/// Minimal length of a program that outputs `x` on the empty condition
/// within the budget; `None` stands for infinity. The scan order is the
/// program-table order, so the first hit is minimal.
pub fn complexity(
    machine: &dyn ToyMachine,
    x: &BitString,
    budget: u64,
    max_len: u32,
) -> Option<u32> {
    conditional_complexity(machine, x, &BitString::empty(), budget, max_len)
}

/// Minimal length of a program mapping condition `v` to `u` within the
/// budget.
pub fn conditional_complexity(
    machine: &dyn ToyMachine,
    u: &BitString,
    v: &BitString,
    budget: u64,
    max_len: u32,
) -> Option<u32> {
    enumerate_programs(max_len.min(MAX_ENUMERABLE_LEN))
        .find(|q| machine.eval(q, v, budget).halted() == Some(u))
        .map(|q| q.len() as u32)
}

/// Total conditional complexity, restricted to a finite condition
/// universe: the minimal |q| <= max_len with eval(q, v) = u such that q
/// halts on every condition z with |z| <= cond_len_cap.
pub fn ct_complexity(
    machine: &dyn ToyMachine,
    u: &BitString,
    v: &BitString,
    budget: u64,
    cond_len_cap: u32,
    max_len: u32,
) -> Option<u32> {
    let total = |q: &BitString| {
        (0..=cond_len_cap as usize)
            .flat_map(BitString::all_of_length)
            .all(|z| machine.eval(q, &z, budget).halted().is_some())
    };
    enumerate_programs(max_len.min(MAX_ENUMERABLE_LEN))
        .find(|q| machine.eval(q, v, budget).halted() == Some(u) && total(q))
        .map(|q| q.len() as u32)
}

/// One cascade matcher per covered left length.
#[derive(Default)]
pub struct CascadeFamily {
    pub matchers: BTreeMap<u32, CascadeMatcher>,
}

impl CascadeFamily {
    pub fn new() -> Self {
        CascadeFamily::default()
    }

    pub fn insert(&mut self, matcher: CascadeMatcher) {
        self.matchers.insert(matcher.n(), matcher);
    }

    pub fn covers(&self, len: usize) -> bool {
        len <= u32::MAX as usize && self.matchers.contains_key(&(len as u32))
    }

    pub fn covered_lengths(&self) -> Vec<u32> {
        self.matchers.keys().copied().collect()
    }
}

/// The candidate list for one string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxList {
    pub x: BitString,
    pub programs: Vec<BitString>,
    /// Index (0-based) of a verified short entry; filled by
    /// [`ApproxBuild::check_list`], never by the builder.
    pub witness: Option<usize>,
}

/// Result of replaying a program table through a cascade family.
pub struct ApproxBuild {
    pub family: CascadeFamily,
    /// Injective map: assigned hash -> the string it decodes to.
    pub decoder: BTreeMap<BitString, BitString>,
    pub table: ProgramTable,
    /// Largest |hash| - k over every matcher in the family.
    pub overhead_const: u32,
    /// Bound slack for list entries: overhead plus the decoder marker bit.
    pub witness_slack: u32,
    /// Width of the all-ones marker selecting the raw-machine branch of
    /// the decoding machine.
    pub pass_marker_width: u32,
    pub machine_name: String,
}

const PASS_MARKER_WIDTH: u32 = 2;

/// Replays the program table (on the empty condition) through the family.
/// Each halting program q with output x issues one request (x, |q|);
/// identical pairs are issued once. Outputs whose length no matcher
/// covers abort the build.
pub fn build_approximator(
    machine: &dyn ToyMachine,
    family: CascadeFamily,
    budget: u64,
    max_prog_len: u32,
) -> Result<ApproxBuild> {
    build_with_condition(machine, &BitString::empty(), family, budget, max_prog_len)
}

pub fn build_with_condition(
    machine: &dyn ToyMachine,
    condition: &BitString,
    mut family: CascadeFamily,
    budget: u64,
    max_prog_len: u32,
) -> Result<ApproxBuild> {
    let table = program_table(machine, condition, budget, max_prog_len)?;
    let mut issued: BTreeSet<(BitString, u32)> = BTreeSet::new();
    for (q, x) in &table.entries {
        let k = q.len() as u32;
        if !issued.insert((x.clone(), k)) {
            continue;
        }
        let matcher =
            family
                .matchers
                .get_mut(&(x.len() as u32))
                .ok_or(Error::LeftUniverseMiss {
                    output: x.to_string(),
                    len: x.len(),
                })?;
        matcher.request(&MatchRequest { x: x.clone(), k })?;
    }
    let mut decoder: BTreeMap<BitString, BitString> = BTreeMap::new();
    for m in family.matchers.values() {
        for (hash, x) in m.assignment() {
            if let Some(existing) = decoder.get(hash) {
                if existing != x {
                    return Err(Error::CrossFamilyCollision {
                        hash: hash.to_string(),
                        existing: existing.to_string(),
                    });
                }
            }
            decoder.insert(hash.clone(), x.clone());
        }
    }
    let overhead_const = family
        .matchers
        .values()
        .map(|m| m.overhead_const())
        .max()
        .unwrap_or(1);
    Ok(ApproxBuild {
        family,
        decoder,
        table,
        overhead_const,
        witness_slack: overhead_const + 1,
        pass_marker_width: PASS_MARKER_WIDTH,
        machine_name: machine.name().to_string(),
    })
}

impl ApproxBuild {
    /// The deterministic candidate list for x: every cascade neighbor of x
    /// (levels in ascending order, then the reserved self node), each
    /// wrapped with the decoder marker bit 0.
    pub fn list(&self, x: &BitString) -> Result<ApproxList> {
        let matcher =
            self.family
                .matchers
                .get(&(x.len() as u32))
                .ok_or(Error::LeftUniverseMiss {
                    output: x.to_string(),
                    len: x.len(),
                })?;
        let marker = BitString::from_bits(&[0]);
        let programs = matcher
            .list_neighbors(x)?
            .into_iter()
            .map(|p| marker.concat(&p))
            .collect();
        Ok(ApproxList {
            x: x.clone(),
            programs,
            witness: None,
        })
    }

    /// 1-based total indexing into list(x).
    pub fn list_index(&self, j: usize, x: &BitString) -> Result<BitString> {
        let list = self.list(x)?;
        if j == 0 || j > list.programs.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: list.programs.len(),
            });
        }
        Ok(list.programs[j - 1].clone())
    }

    /// The two-branch decoding machine: marker bit 0 selects the replay
    /// decoder (the hash assignment), an all-ones prefix of the recorded
    /// width selects the raw machine on the empty condition. Everything
    /// else diverges.
    pub fn decode(&self, machine: &dyn ToyMachine, p: &BitString) -> Option<BitString> {
        if p.is_empty() {
            return None;
        }
        if p.bit(0) == 0 {
            return self.decoder.get(&p.suffix_from(1)).cloned();
        }
        let w = self.pass_marker_width as usize;
        if p.len() >= w && (0..w).all(|i| p.bit(i) == 1) {
            return machine
                .eval(&p.suffix_from(w), &BitString::empty(), self.table.budget)
                .halted()
                .cloned();
        }
        None
    }

    /// Fills the witness: the first list entry that decodes to x and whose
    /// length is within complexity(x) + witness_slack.
    pub fn check_list(&self, machine: &dyn ToyMachine, x: &BitString) -> Result<ApproxList> {
        let mut list = self.list(x)?;
        let bound = complexity(machine, x, self.table.budget, self.table.max_prog_len)
            .map(|c| c + self.witness_slack);
        if let Some(bound) = bound {
            list.witness = list.programs.iter().position(|p| {
                p.len() as u32 <= bound && self.decode(machine, p).as_ref() == Some(x)
            });
        }
        Ok(list)
    }

    /// Replays the deterministic process again to invert a hash: the
    /// string assigned to `p`, if any.
    pub fn recover(&self, p: &BitString) -> Option<BitString> {
        self.decoder.get(p).cloned()
    }
}

/// Compresses `a` given condition `b`: replays the table of U(., b)
/// through the family and returns the hash matched to (a, |q|) for the
/// shortest halting q with output a. The result satisfies
/// |p| <= conditional_complexity(a|b) + overhead; `a` is recoverable from
/// (p, b) by rebuilding the same process and looking the hash up.
pub fn conditional_compress(
    machine: &dyn ToyMachine,
    a: &BitString,
    b: &BitString,
    family: CascadeFamily,
    budget: u64,
    max_prog_len: u32,
) -> Result<(BitString, ApproxBuild)> {
    let build = build_with_condition(machine, b, family, budget, max_prog_len)?;
    let k = build
        .table
        .entries
        .iter()
        .find(|(_, out)| out == a)
        .map(|(q, _)| q.len() as u32)
        .ok_or(Error::NotFound {
            max_len: max_prog_len,
        })?;
    let matcher = &build.family.matchers[&(a.len() as u32)];
    let hash = matcher
        .served_hash(a, k)
        .expect("the replay issued (a, k)")
        .clone();
    Ok((hash, build))
}
