//! The approx table file: everything `approx list` needs to reproduce
//! candidate lists and verify witnesses without replaying the build.
//!
//! Layout (line oriented):
//!
//! ```text
//! approxtable v1 machine=<name> budget=<B> max_prog_len=<L> overhead=<c> witness_slack=<s> pass_marker=<w>
//! lengths <n0> <n1> ...
//! graph n=<n> levels=<count>
//! level k=<k> left=<rows>
//! <embedded bigraph v1 block: header plus one line per left node>
//! ...
//! decode <hash> <x>
//! ...
//! end
//! ```

use std::collections::BTreeMap;

use slk_core::approximator::{complexity, ApproxBuild, ToyMachine};
use slk_core::bitgraph::BitGraph;
use slk_core::bits::BitString;
use slk_core::Error;

pub struct ApproxTable {
    pub machine: String,
    pub budget: u64,
    pub max_prog_len: u32,
    pub overhead: u32,
    pub witness_slack: u32,
    pub pass_marker: u32,
    pub lengths: Vec<u32>,
    pub levels: BTreeMap<u32, Vec<(u32, BitGraph)>>,
    pub decoder: BTreeMap<BitString, BitString>,
}

pub fn write_table(build: &ApproxBuild) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "approxtable v1 machine={} budget={} max_prog_len={} overhead={} witness_slack={} pass_marker={}\n",
        build.machine_name,
        build.table.budget,
        build.table.max_prog_len,
        build.overhead_const,
        build.witness_slack,
        build.pass_marker_width,
    ));
    let lengths: Vec<String> = build
        .family
        .covered_lengths()
        .iter()
        .map(u32::to_string)
        .collect();
    out.push_str(&format!("lengths {}\n", lengths.join(" ")));
    for (n, matcher) in &build.family.matchers {
        out.push_str(&format!(
            "graph n={} levels={}\n",
            n,
            matcher.levels().len()
        ));
        for level in matcher.levels() {
            out.push_str(&format!(
                "level k={} left={}\n",
                level.k,
                level.graph.left_count()
            ));
            out.push_str(&level.graph.write_text());
        }
    }
    for (hash, x) in &build.decoder {
        out.push_str(&format!("decode {hash} {x}\n"));
    }
    out.push_str("end\n");
    out
}

fn field<'a>(token: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, Error> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or(Error::Parse {
            line,
            msg: format!("expected {key}=<value>"),
        })
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, Error> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number {s:?}"),
    })
}

pub fn read_table(text: &str) -> Result<ApproxTable, Error> {
    let lines: Vec<&str> = text.lines().collect();
    let mut at = 0usize;
    let next = |at: &mut usize| -> Result<&str, Error> {
        let line = lines.get(*at).copied().ok_or(Error::Parse {
            line: *at + 1,
            msg: "unexpected end of table".into(),
        })?;
        *at += 1;
        Ok(line)
    };

    let header = next(&mut at)?;
    let mut toks = header.split(' ');
    if toks.next() != Some("approxtable") || toks.next() != Some("v1") {
        return Err(Error::Parse {
            line: 1,
            msg: format!("bad table header {header:?}"),
        });
    }
    let machine = field(toks.next(), "machine", 1)?.to_string();
    let budget = parse_num(field(toks.next(), "budget", 1)?, 1)?;
    let max_prog_len = parse_num(field(toks.next(), "max_prog_len", 1)?, 1)?;
    let overhead = parse_num(field(toks.next(), "overhead", 1)?, 1)?;
    let witness_slack = parse_num(field(toks.next(), "witness_slack", 1)?, 1)?;
    let pass_marker = parse_num(field(toks.next(), "pass_marker", 1)?, 1)?;

    let lengths_line = next(&mut at)?;
    let rest = lengths_line.strip_prefix("lengths").ok_or(Error::Parse {
        line: at,
        msg: format!("expected lengths line, got {lengths_line:?}"),
    })?;
    let lengths: Vec<u32> = rest
        .split_whitespace()
        .map(|t| parse_num(t, at))
        .collect::<Result<_, _>>()?;

    let mut levels: BTreeMap<u32, Vec<(u32, BitGraph)>> = BTreeMap::new();
    let mut decoder = BTreeMap::new();
    loop {
        let line_no = at + 1;
        let line = next(&mut at)?;
        if line == "end" {
            break;
        }
        if let Some(rest) = line.strip_prefix("graph ") {
            let mut toks = rest.split(' ');
            let n: u32 = parse_num(field(toks.next(), "n", line_no)?, line_no)?;
            let count: usize = parse_num(field(toks.next(), "levels", line_no)?, line_no)?;
            let mut graphs = Vec::with_capacity(count);
            for _ in 0..count {
                let level_no = at + 1;
                let level_line = next(&mut at)?;
                let mut toks = level_line
                    .strip_prefix("level ")
                    .ok_or(Error::Parse {
                        line: level_no,
                        msg: format!("expected level line, got {level_line:?}"),
                    })?
                    .split(' ');
                let k: u32 = parse_num(field(toks.next(), "k", level_no)?, level_no)?;
                let left: usize = parse_num(field(toks.next(), "left", level_no)?, level_no)?;
                let mut block = String::new();
                for _ in 0..left + 1 {
                    block.push_str(next(&mut at)?);
                    block.push('\n');
                }
                graphs.push((k, BitGraph::read_text(&block)?));
            }
            levels.insert(n, graphs);
        } else if let Some(rest) = line.strip_prefix("decode ") {
            let mut toks = rest.split(' ');
            let (Some(hash), Some(x), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("bad decode line {line:?}"),
                });
            };
            decoder.insert(BitString::parse(hash)?, BitString::parse(x)?);
        } else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unexpected line {line:?}"),
            });
        }
    }
    Ok(ApproxTable {
        machine,
        budget,
        max_prog_len,
        overhead,
        witness_slack,
        pass_marker,
        lengths,
        levels,
        decoder,
    })
}

impl ApproxTable {
    /// The same deterministic candidate list the build produces: level
    /// neighbors ascending, then the reserved self node, each behind the
    /// decoder marker bit.
    pub fn list(&self, x: &BitString) -> Result<Vec<BitString>, Error> {
        let n = x.len() as u32;
        if !self.lengths.contains(&n) {
            return Err(Error::LeftUniverseMiss {
                output: x.to_string(),
                len: x.len(),
            });
        }
        let marker = BitString::from_bits(&[0]);
        let mut out = Vec::new();
        if let Some(levels) = self.levels.get(&n) {
            for (_, g) in levels {
                for p in g.neighbors(x)? {
                    out.push(marker.concat(p));
                }
            }
        }
        let self_hash = BitString::from_bits(&[1]).concat(x);
        out.push(marker.concat(&self_hash));
        Ok(out)
    }

    pub fn decode(&self, machine: &dyn ToyMachine, p: &BitString) -> Option<BitString> {
        if p.is_empty() {
            return None;
        }
        if p.bit(0) == 0 {
            return self.decoder.get(&p.suffix_from(1)).cloned();
        }
        let w = self.pass_marker as usize;
        if p.len() >= w && (0..w).all(|i| p.bit(i) == 1) {
            return machine
                .eval(&p.suffix_from(w), &BitString::empty(), self.budget)
                .halted()
                .cloned();
        }
        None
    }

    /// First list entry decoding to x within the length bound, together
    /// with the brute-force complexity it was checked against.
    pub fn find_witness(
        &self,
        machine: &dyn ToyMachine,
        x: &BitString,
        list: &[BitString],
    ) -> Option<(usize, BitString, u32)> {
        let c = complexity(machine, x, self.budget, self.max_prog_len)?;
        let bound = c + self.witness_slack;
        list.iter()
            .position(|p| p.len() as u32 <= bound && self.decode(machine, p).as_ref() == Some(x))
            .map(|j| (j, list[j].clone(), c))
    }
}
