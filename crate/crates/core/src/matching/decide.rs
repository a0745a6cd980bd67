//! Exhaustive decision procedure for the finite on-line matching game.
//!
//! Two players alternate: Requester picks a fresh pair (x,k) within the
//! class budgets, Matcher must answer with a neighbor p of x such that
//! |p| <= k + c and p is not already assigned to a different left node.
//! Matcher wins when Requester runs out of legal requests; Requester wins
//! when some request has no legal answer. The game is finite, so plain
//! minimax with memoization decides the winner and yields a strategy.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::bitgraph::BitGraph;
use crate::bits::BitString;
use crate::budget::WorkMeter;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Matcher,
    Requester,
}

/// Rules of one game instance.
#[derive(Clone, Debug)]
pub struct MatchGameRules {
    pub graph: BitGraph,
    /// Hash length allowance: a legal answer for class k has |p| <= k + c.
    pub overhead: u32,
    /// Per-class limits on distinct requested pairs.
    pub budgets: BTreeMap<u32, u64>,
}

/// Requester-to-move position: which pairs were requested and which hash
/// is held by which left node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GameState {
    requested: BTreeSet<(usize, u32)>,
    assigned: BTreeMap<BitString, usize>,
}

impl GameState {
    pub fn initial() -> Self {
        GameState::default()
    }

    pub fn requested_count(&self) -> usize {
        self.requested.len()
    }
}

#[derive(Clone, Debug)]
pub struct DecideOutcome {
    pub winner: Winner,
    /// One optimal line of play, alternating `R (x,k)` / `M p` rows.
    pub line: Vec<String>,
    pub states_explored: u64,
}

pub struct Solver {
    rules: MatchGameRules,
    memo: HashMap<GameState, Winner>,
    meter: WorkMeter,
    states: u64,
}

impl Solver {
    pub fn new(rules: MatchGameRules, work_budget: u64) -> Self {
        Solver {
            rules,
            memo: HashMap::new(),
            meter: WorkMeter::new(work_budget),
            states: 0,
        }
    }

    pub fn rules(&self) -> &MatchGameRules {
        &self.rules
    }

    /// All pairs Requester may still pick.
    pub fn legal_requests(&self, s: &GameState) -> Vec<(BitString, u32)> {
        let mut out = Vec::new();
        for (&k, &budget) in &self.rules.budgets {
            let in_class = s.requested.iter().filter(|(_, kk)| *kk == k).count() as u64;
            if in_class >= budget {
                continue;
            }
            for (i, x) in self.rules.graph.left_nodes().iter().enumerate() {
                if !s.requested.contains(&(i, k)) {
                    out.push((x.clone(), k));
                }
            }
        }
        out
    }

    fn legal_replies(&self, s: &GameState, xi: usize, k: u32) -> Vec<BitString> {
        self.rules
            .graph
            .neighbors_at(xi)
            .iter()
            .filter(|p| p.len() as u64 <= k as u64 + self.rules.overhead as u64)
            .filter(|p| match s.assigned.get(*p) {
                None => true,
                Some(&owner) => owner == xi,
            })
            .cloned()
            .collect()
    }

    fn requester_moves(&self, s: &GameState) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (&k, &budget) in &self.rules.budgets {
            let in_class = s.requested.iter().filter(|(_, kk)| *kk == k).count() as u64;
            if in_class >= budget {
                continue;
            }
            for i in 0..self.rules.graph.left_count() {
                if !s.requested.contains(&(i, k)) {
                    out.push((i, k));
                }
            }
        }
        out
    }

    fn after(&self, s: &GameState, xi: usize, k: u32, reply: &BitString) -> GameState {
        let mut next = s.clone();
        next.requested.insert((xi, k));
        next.assigned.entry(reply.clone()).or_insert(xi);
        next
    }

    fn eval_requester(&mut self, s: &GameState) -> Result<Winner> {
        if let Some(&w) = self.memo.get(s) {
            return Ok(w);
        }
        self.meter.charge(1)?;
        self.states += 1;
        let moves = self.requester_moves(s);
        let mut winner = Winner::Matcher;
        for (xi, k) in moves {
            if self.eval_matcher(s, xi, k)? == Winner::Requester {
                winner = Winner::Requester;
                break;
            }
        }
        self.memo.insert(s.clone(), winner);
        Ok(winner)
    }

    fn eval_matcher(&mut self, s: &GameState, xi: usize, k: u32) -> Result<Winner> {
        let replies = self.legal_replies(s, xi, k);
        if replies.is_empty() {
            return Ok(Winner::Requester);
        }
        for p in replies {
            let next = self.after(s, xi, k, &p);
            if self.eval_requester(&next)? == Winner::Matcher {
                return Ok(Winner::Matcher);
            }
        }
        Ok(Winner::Requester)
    }

    /// Decides the game from the empty position and extracts one optimal
    /// line for the winner.
    pub fn decide(&mut self) -> Result<DecideOutcome> {
        let root = GameState::initial();
        let winner = self.eval_requester(&root)?;
        let line = self.principal_line(root, winner)?;
        Ok(DecideOutcome {
            winner,
            line,
            states_explored: self.states,
        })
    }

    fn principal_line(&mut self, mut s: GameState, winner: Winner) -> Result<Vec<String>> {
        let mut line = Vec::new();
        loop {
            let moves = self.requester_moves(&s);
            if moves.is_empty() {
                break;
            }
            // Requester plays a winning request when he is the winner,
            // otherwise his first legal try.
            let mut chosen = None;
            if winner == Winner::Requester {
                for (xi, k) in &moves {
                    if self.eval_matcher(&s, *xi, *k)? == Winner::Requester {
                        chosen = Some((*xi, *k));
                        break;
                    }
                }
            }
            let (xi, k) = chosen.unwrap_or(moves[0]);
            let x = self.rules.graph.left_nodes()[xi].clone();
            line.push(format!("R {x} {k}"));
            let replies = self.legal_replies(&s, xi, k);
            if replies.is_empty() {
                line.push("M fail".into());
                break;
            }
            let mut reply = None;
            for p in &replies {
                let next = self.after(&s, xi, k, p);
                if self.eval_requester(&next)? == Winner::Matcher {
                    reply = Some(p.clone());
                    break;
                }
            }
            let p = reply.unwrap_or_else(|| replies[0].clone());
            line.push(format!("M {p}"));
            s = self.after(&s, xi, k, &p);
        }
        Ok(line)
    }

    /// Applies one exchange to a live position: Requester has just asked
    /// (x,k); returns Matcher's reply (preferring one that keeps the game
    /// won for Matcher) or None when no legal reply exists.
    pub fn respond(
        &mut self,
        s: &mut GameState,
        x: &BitString,
        k: u32,
    ) -> Result<Option<BitString>> {
        let xi = match self.rules.graph.left_index(x) {
            Some(i) => i,
            None => return Ok(None),
        };
        let replies = self.legal_replies(s, xi, k);
        if replies.is_empty() {
            return Ok(None);
        }
        let mut pick = None;
        for p in &replies {
            let next = self.after(s, xi, k, p);
            if self.eval_requester(&next)? == Winner::Matcher {
                pick = Some(p.clone());
                break;
            }
        }
        let p = pick.unwrap_or_else(|| replies[0].clone());
        *s = self.after(s, xi, k, &p);
        Ok(Some(p))
    }
}

/// Convenience wrapper: decide a game in one call.
pub fn decide_online_matching(
    graph: &BitGraph,
    overhead: u32,
    budgets: &BTreeMap<u32, u64>,
    work_budget: u64,
) -> Result<DecideOutcome> {
    let mut solver = Solver::new(
        MatchGameRules {
            graph: graph.clone(),
            overhead,
            budgets: budgets.clone(),
        },
        work_budget,
    );
    solver.decide()
}
