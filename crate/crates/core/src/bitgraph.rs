//! Finite bipartite graphs whose nodes are bit strings.
//!
//! Left nodes are stored in an explicit order and each carries an ordered,
//! duplicate-free neighbor list; all right nodes share one length. Both
//! orders are part of graph identity: the deterministic greedy matcher and
//! every downstream list construction read neighbors in stored order.
//!
//! Right nodes live only inside neighbor lists. The right universe is
//! implicitly "all strings of length `right_len`", which keeps files small
//! and matches the convention that hash values are drawn from a fixed-width
//! space.
//!
//! Text format (UTF-8, line-oriented):
//!
//! ```text
//! bigraph v1 right_len=<m>
//! <left-bits> : <nbr1> <nbr2> ...
//! ```
//!
//! `-` stands for the empty string. A node line with no neighbors ends at
//! the `:`. Writing a parsed graph reproduces the input byte for byte.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::bits::BitString;
use crate::error::Error;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    right_len: usize,
    lefts: Vec<BitString>,
    adj: Vec<Vec<BitString>>,
    index: HashMap<BitString, usize>,
}

impl BitGraph {
    /// Validates and builds a graph from ordered (left, neighbors) rows.
    pub fn new(right_len: usize, rows: Vec<(BitString, Vec<BitString>)>) -> Result<Self> {
        let mut lefts = Vec::with_capacity(rows.len());
        let mut adj = Vec::with_capacity(rows.len());
        let mut index = HashMap::with_capacity(rows.len());
        for (line, (left, nbrs)) in rows.into_iter().enumerate() {
            let line = line + 2; // header is line 1
            if index.contains_key(&left) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate left node {left}"),
                });
            }
            let mut seen = HashSet::with_capacity(nbrs.len());
            for p in &nbrs {
                if p.len() != right_len {
                    return Err(Error::InconsistentRightLen {
                        line,
                        expected: right_len,
                        got: p.len(),
                        node: p.to_string(),
                    });
                }
                if !seen.insert(p.clone()) {
                    return Err(Error::DuplicateNeighbor {
                        line,
                        left: left.to_string(),
                        neighbor: p.to_string(),
                    });
                }
            }
            index.insert(left.clone(), lefts.len());
            lefts.push(left);
            adj.push(nbrs);
        }
        Ok(BitGraph {
            right_len,
            lefts,
            adj,
            index,
        })
    }

    pub fn right_len(&self) -> usize {
        self.right_len
    }

    pub fn left_nodes(&self) -> &[BitString] {
        &self.lefts
    }

    pub fn left_count(&self) -> usize {
        self.lefts.len()
    }

    pub fn contains_left(&self, x: &BitString) -> bool {
        self.index.contains_key(x)
    }

    pub fn left_index(&self, x: &BitString) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn neighbors(&self, x: &BitString) -> Result<&[BitString]> {
        match self.index.get(x) {
            Some(&i) => Ok(&self.adj[i]),
            None => Err(Error::UnknownLeftNode(x.to_string())),
        }
    }

    pub fn neighbors_at(&self, i: usize) -> &[BitString] {
        &self.adj[i]
    }

    /// Number of neighbors of `x`; errors on unknown left nodes.
    pub fn degree(&self, x: &BitString) -> Result<usize> {
        Ok(self.neighbors(x)?.len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every right node that occurs in some neighbor list.
    pub fn distinct_right_nodes(&self) -> BTreeSet<BitString> {
        let mut out = BTreeSet::new();
        for nbrs in &self.adj {
            for p in nbrs {
                out.insert(p.clone());
            }
        }
        out
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "bigraph v1 right_len={}", self.right_len).unwrap();
        for (x, nbrs) in self.lefts.iter().zip(&self.adj) {
            write!(out, "{x} :").unwrap();
            for p in nbrs {
                write!(out, " {p}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn read_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let right_len = parse_header(header)?;
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            if line.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "blank line".into(),
                });
            }
            rows.push(parse_node_line(line, line_no)?);
        }
        BitGraph::new(right_len, rows)
    }
}

fn parse_header(header: &str) -> Result<usize> {
    let rest = header
        .strip_prefix("bigraph v1 right_len=")
        .ok_or(Error::Parse {
            line: 1,
            msg: format!("bad header {header:?}"),
        })?;
    rest.parse().map_err(|_| Error::Parse {
        line: 1,
        msg: format!("bad right_len {rest:?}"),
    })
}

fn parse_node_line(line: &str, line_no: usize) -> Result<(BitString, Vec<BitString>)> {
    let mut tokens = line.split(' ');
    let left_tok = tokens.next().unwrap_or("");
    let left = BitString::parse(left_tok).map_err(|e| at_line(e, line_no))?;
    match tokens.next() {
        Some(":") => {}
        other => {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected ':' after left node, got {other:?}"),
            })
        }
    }
    let mut nbrs = Vec::new();
    for tok in tokens {
        nbrs.push(BitString::parse(tok).map_err(|e| at_line(e, line_no))?);
    }
    Ok((left, nbrs))
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

/// Tagged disjoint union: right node `p` of graph `i` becomes `tag_i · p`.
///
/// All graphs must share the same ordered left set and right length; tags
/// must be distinct and of equal length. The neighbor list of each left
/// node is the concatenation of its per-graph lists, in graph order.
pub fn disjoint_union(gs: &[BitGraph], tags: &[BitString]) -> Result<BitGraph> {
    if gs.is_empty() {
        return Err(Error::BadTags("empty graph list".into()));
    }
    if gs.len() != tags.len() {
        return Err(Error::BadTags(format!(
            "{} graphs but {} tags",
            gs.len(),
            tags.len()
        )));
    }
    let tag_len = tags[0].len();
    let mut seen = HashSet::new();
    for t in tags {
        if t.len() != tag_len {
            return Err(Error::BadTags(format!("ragged tag {t}")));
        }
        if !seen.insert(t.clone()) {
            return Err(Error::BadTags(format!("repeated tag {t}")));
        }
    }
    let base = &gs[0];
    for g in &gs[1..] {
        if g.lefts != base.lefts {
            return Err(Error::MismatchedLeftSets(
                "graphs in a union must share identical ordered left sets".into(),
            ));
        }
        if g.right_len != base.right_len {
            return Err(Error::BadTags(format!(
                "right lengths differ: {} vs {}",
                g.right_len, base.right_len
            )));
        }
    }
    let right_len = tag_len + base.right_len;
    let rows = base
        .lefts
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut nbrs = Vec::new();
            for (g, tag) in gs.iter().zip(tags) {
                for p in &g.adj[i] {
                    nbrs.push(tag.concat(p));
                }
            }
            (x.clone(), nbrs)
        })
        .collect();
    BitGraph::new(right_len, rows)
}

/// A keyed family of graphs sharing one left convention, with the tabulated
/// overhead function `c(n)` recorded next to it.
#[derive(Clone, Debug)]
pub struct GraphFamily {
    pub members: BTreeMap<(u32, u32), BitGraph>,
    pub overhead_fn: BTreeMap<u32, u32>,
    pub family_slack: u32,
    /// false: members[(n,k)] has all left nodes of length exactly n;
    /// true: left nodes have length >= k (variable-length convention).
    pub variable_length: bool,
}

impl GraphFamily {
    pub fn new(variable_length: bool, family_slack: u32) -> Self {
        GraphFamily {
            members: BTreeMap::new(),
            overhead_fn: BTreeMap::new(),
            family_slack,
            variable_length,
        }
    }

    pub fn insert(&mut self, n: u32, k: u32, graph: BitGraph) -> Result<()> {
        if self.variable_length {
            if let Some(short) = graph.left_nodes().iter().find(|x| (x.len() as u32) < k) {
                return Err(Error::InvalidSpec(format!(
                    "variable-length member ({n},{k}) has left node {short} shorter than k"
                )));
            }
        } else if let Some(bad) = graph.left_nodes().iter().find(|x| x.len() as u32 != n) {
            return Err(Error::InvalidSpec(format!(
                "member ({n},{k}) has left node {bad} of length != n"
            )));
        }
        let c = *self
            .overhead_fn
            .entry(n)
            .or_insert_with(|| (graph.right_len() as u32).saturating_sub(k));
        if graph.right_len() as u32 > k + c + self.family_slack {
            return Err(Error::InvalidSpec(format!(
                "member ({n},{k}) right_len {} exceeds k + c(n) + slack = {}",
                graph.right_len(),
                k + c + self.family_slack
            )));
        }
        self.members.insert((n, k), graph);
        Ok(())
    }

    pub fn get(&self, n: u32, k: u32) -> Option<&BitGraph> {
        self.members.get(&(n, k))
    }

    pub fn overhead(&self, n: u32) -> Option<u32> {
        self.overhead_fn.get(&n).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    fn complete_2x4() -> BitGraph {
        // two left nodes of length 1, complete to all four 2-bit rights
        let rights: Vec<BitString> = BitString::all_of_length(2).collect();
        BitGraph::new(2, vec![(bs("0"), rights.clone()), (bs("1"), rights)]).unwrap()
    }

    #[test]
    fn degree_on_complete_graph() {
        let g = complete_2x4();
        assert_eq!(g.degree(&bs("0")).unwrap(), 4);
    }

    #[test]
    fn degree_of_isolated_node_is_zero() {
        let g = BitGraph::new(2, vec![(bs("0"), vec![])]).unwrap();
        assert_eq!(g.degree(&bs("0")).unwrap(), 0);
    }

    #[test]
    fn degree_unknown_left_node_errors() {
        let g = complete_2x4();
        assert!(matches!(
            g.degree(&bs("00")),
            Err(Error::UnknownLeftNode(_))
        ));
    }

    #[test]
    fn round_trip_complete_graph() {
        let g = complete_2x4();
        let text = g.write_text();
        let parsed = BitGraph::read_text(&text).unwrap();
        assert_eq!(parsed, g);
        assert_eq!(parsed.write_text(), text);
    }

    #[test]
    fn mixed_right_lengths_rejected() {
        let text = "bigraph v1 right_len=2\n0 : 00 1\n";
        match BitGraph::read_text(text) {
            Err(Error::InconsistentRightLen { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected inconsistent right length, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_neighbor_rejected() {
        let text = "bigraph v1 right_len=2\n0 : 00 00\n";
        assert!(matches!(
            BitGraph::read_text(text),
            Err(Error::DuplicateNeighbor { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_left_node_rejected() {
        let text = "bigraph v1 right_len=1\n0 : 1\n0 : 0\n";
        assert!(matches!(
            BitGraph::read_text(text),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn empty_string_nodes_round_trip() {
        // Empty left node, plus a node line with no neighbors.
        let text = "bigraph v1 right_len=1\n- : 0 1\n01 :\n";
        let g = BitGraph::read_text(text).unwrap();
        assert_eq!(g.write_text(), text);
        assert_eq!(g.degree(&BitString::empty()).unwrap(), 2);
    }

    #[test]
    fn union_with_empty_tag_is_identity() {
        let g = complete_2x4();
        let u = disjoint_union(std::slice::from_ref(&g), &[BitString::empty()]).unwrap();
        assert_eq!(u, g);
    }

    #[test]
    fn four_copies_quadruple_degree() {
        let g = complete_2x4();
        let tags: Vec<BitString> = BitString::all_of_length(2).collect();
        let u = disjoint_union(&[g.clone(), g.clone(), g.clone(), g.clone()], &tags).unwrap();
        assert_eq!(u.degree(&bs("0")).unwrap(), 16);
        assert_eq!(u.right_len(), 4);
    }

    #[test]
    fn union_of_two_distinct_graphs_matches_hand_enumeration() {
        let g1 =
            BitGraph::new(1, vec![(bs("0"), vec![bs("0")]), (bs("1"), vec![bs("1")])]).unwrap();
        let g2 = BitGraph::new(
            1,
            vec![(bs("0"), vec![bs("1"), bs("0")]), (bs("1"), vec![])],
        )
        .unwrap();
        let u = disjoint_union(&[g1, g2], &[bs("0"), bs("1")]).unwrap();
        // Hand enumeration: node 0 gets 0-tagged [00] then 1-tagged [11, 10];
        // node 1 gets [01] from g1 and nothing from g2.
        let n0: Vec<String> = u
            .neighbors(&bs("0"))
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        let n1: Vec<String> = u
            .neighbors(&bs("1"))
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(n0, vec!["00", "11", "10"]);
        assert_eq!(n1, vec!["01"]);
    }

    #[test]
    fn union_rejects_mismatched_lefts_and_bad_tags() {
        let g1 = BitGraph::new(1, vec![(bs("0"), vec![])]).unwrap();
        let g2 = BitGraph::new(1, vec![(bs("1"), vec![])]).unwrap();
        assert!(matches!(
            disjoint_union(&[g1.clone(), g2], &[bs("0"), bs("1")]),
            Err(Error::MismatchedLeftSets(_))
        ));
        assert!(matches!(
            disjoint_union(&[g1.clone(), g1.clone()], &[bs("0"), bs("0")]),
            Err(Error::BadTags(_))
        ));
        assert!(matches!(
            disjoint_union(&[g1.clone(), g1], &[bs("0"), bs("10")]),
            Err(Error::BadTags(_))
        ));
    }

    #[test]
    fn union_right_sets_are_disjoint_and_degrees_add() {
        let g1 = complete_2x4();
        let g2 = BitGraph::new(
            2,
            vec![
                (bs("0"), vec![bs("00")]),
                (bs("1"), vec![bs("11"), bs("01")]),
            ],
        )
        .unwrap();
        let u = disjoint_union(&[g1.clone(), g2.clone()], &[bs("0"), bs("1")]).unwrap();
        for x in [bs("0"), bs("1")] {
            assert_eq!(
                u.degree(&x).unwrap(),
                g1.degree(&x).unwrap() + g2.degree(&x).unwrap()
            );
        }
        // Tags force disjoint namespaces.
        let rights = u.distinct_right_nodes();
        let from_g1: BTreeSet<_> = rights.iter().filter(|p| p.bit(0) == 0).collect();
        let from_g2: BTreeSet<_> = rights.iter().filter(|p| p.bit(0) == 1).collect();
        assert_eq!(from_g1.len() + from_g2.len(), rights.len());
    }

    #[test]
    fn family_records_overhead_and_checks_slack() {
        let mut fam = GraphFamily::new(false, 0);
        let g = complete_2x4(); // left length 1, right length 2
        fam.insert(1, 0, g.clone()).unwrap();
        assert_eq!(fam.overhead(1), Some(2));
        // right_len 2 > k + c + slack = 1 + 2 + 0 fails for k=1? 2 <= 3 ok.
        fam.insert(1, 1, g.clone()).unwrap();
        // A member whose right length overshoots c(n) + slack is rejected.
        let fat = disjoint_union(&[g.clone(), g], &[bs("0"), bs("1")]).unwrap();
        assert!(fam.insert(1, 0, fat).is_err());
    }
}
