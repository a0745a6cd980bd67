//! The pawn game on a 2^(k+d) by 2^(k+d) grid.
//!
//! White places pawns, at most one per row and one per column, and never
//! moves or removes them. Black disables cells: a whole column at a time,
//! or at most one cell in every column. Black gets fewer than 2^(k+1)
//! non-pass moves. White has lost if after her turn every pawn of hers
//! stands on a disabled cell. A run ends as white-survives once Black can
//! no longer act and the board is stable; passing forever changes nothing.

use std::collections::{HashMap, HashSet};

use crate::approximator::ToyMachine;
use crate::bits::BitString;
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WhiteMove {
    Pass,
    Place {
        row: u32,
        col: u32,
    },
    /// No legal placement exists; the runner scores it as a loss.
    Concede,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlackMove {
    Pass,
    DisableColumn(u32),
    /// At most one cell per column.
    DisableCells(Vec<(u32, u32)>),
}

#[derive(Clone, Debug)]
pub struct PawnGameState {
    pub k: u32,
    pub d: u32,
    side: u32,
    pawns: Vec<(u32, u32)>,
    pawn_row_flags: Vec<bool>,
    pawn_col_flags: Vec<bool>,
    disabled_col_flags: Vec<bool>,
    disabled_col_count: u32,
    /// Individually disabled cells, exact set (column moves not included).
    cells: HashSet<(u32, u32)>,
    /// Per-row bitmap of individually disabled cells, for fast scans.
    row_cells: HashMap<u32, Vec<bool>>,
    black_moves: u32,
    white_moves: u32,
}

impl PawnGameState {
    pub fn new(k: u32, d: u32) -> Result<Self> {
        if k + d > 13 {
            return Err(Error::ResourceLimit(format!(
                "grid side 2^{} beyond desk scale",
                k + d
            )));
        }
        let side = 1u32 << (k + d);
        Ok(PawnGameState {
            k,
            d,
            side,
            pawns: Vec::new(),
            pawn_row_flags: vec![false; side as usize],
            pawn_col_flags: vec![false; side as usize],
            disabled_col_flags: vec![false; side as usize],
            disabled_col_count: 0,
            cells: HashSet::new(),
            row_cells: HashMap::new(),
            black_moves: 0,
            white_moves: 0,
        })
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn pawns(&self) -> &[(u32, u32)] {
        &self.pawns
    }

    pub fn black_moves(&self) -> u32 {
        self.black_moves
    }

    pub fn white_moves(&self) -> u32 {
        self.white_moves
    }

    /// Black must stay strictly below 2^(k+1) moves.
    pub fn black_budget(&self) -> u32 {
        (1u32 << (self.k + 1)) - 1
    }

    pub fn black_exhausted(&self) -> bool {
        self.black_moves >= self.black_budget()
    }

    pub fn is_disabled(&self, row: u32, col: u32) -> bool {
        self.disabled_col_flags[col as usize]
            || self
                .row_cells
                .get(&row)
                .map(|flags| flags[col as usize])
                .unwrap_or(false)
    }

    pub fn row_has_pawn(&self, row: u32) -> bool {
        self.pawn_row_flags[row as usize]
    }

    pub fn col_has_pawn(&self, col: u32) -> bool {
        self.pawn_col_flags[col as usize]
    }

    /// All pawns disabled, with at least one pawn on the board.
    pub fn white_lost(&self) -> bool {
        !self.pawns.is_empty() && self.pawns.iter().all(|&(r, c)| self.is_disabled(r, c))
    }

    /// Exact number of disabled cells.
    pub fn disabled_cell_count(&self) -> u64 {
        let from_cols = self.disabled_col_count as u64 * self.side as u64;
        let extra = self
            .cells
            .iter()
            .filter(|&&(_, c)| !self.disabled_col_flags[c as usize])
            .count() as u64;
        from_cols + extra
    }

    /// Cells unavailable to White because their row or column has a pawn.
    pub fn pawn_blocked_count(&self) -> u64 {
        let rows = self.pawns.len() as u64;
        let cols = self.pawns.len() as u64;
        rows * self.side as u64 + cols * self.side as u64 - rows * cols
    }

    pub fn apply_white(&mut self, mv: &WhiteMove) -> Result<()> {
        match mv {
            WhiteMove::Pass | WhiteMove::Concede => Ok(()),
            WhiteMove::Place { row, col } => {
                if *row >= self.side || *col >= self.side {
                    return Err(Error::IllegalMove {
                        player: "white",
                        msg: format!("cell ({row},{col}) outside the grid"),
                    });
                }
                if self.pawn_row_flags[*row as usize] {
                    return Err(Error::IllegalMove {
                        player: "white",
                        msg: format!("row {row} already has a pawn"),
                    });
                }
                if self.pawn_col_flags[*col as usize] {
                    return Err(Error::IllegalMove {
                        player: "white",
                        msg: format!("column {col} already has a pawn"),
                    });
                }
                self.pawns.push((*row, *col));
                self.pawn_row_flags[*row as usize] = true;
                self.pawn_col_flags[*col as usize] = true;
                self.white_moves += 1;
                Ok(())
            }
        }
    }

    pub fn apply_black(&mut self, mv: &BlackMove) -> Result<()> {
        let is_move = !matches!(mv, BlackMove::Pass);
        if is_move && self.black_exhausted() {
            return Err(Error::IllegalMove {
                player: "black",
                msg: format!("move budget {} exhausted", self.black_budget()),
            });
        }
        match mv {
            BlackMove::Pass => {}
            BlackMove::DisableColumn(col) => {
                if *col >= self.side {
                    return Err(Error::IllegalMove {
                        player: "black",
                        msg: format!("column {col} outside the grid"),
                    });
                }
                if !self.disabled_col_flags[*col as usize] {
                    self.disabled_col_flags[*col as usize] = true;
                    self.disabled_col_count += 1;
                }
                self.black_moves += 1;
            }
            BlackMove::DisableCells(cells) => {
                let mut cols_seen = HashSet::new();
                for &(r, c) in cells {
                    if r >= self.side || c >= self.side {
                        return Err(Error::IllegalMove {
                            player: "black",
                            msg: format!("cell ({r},{c}) outside the grid"),
                        });
                    }
                    if !cols_seen.insert(c) {
                        return Err(Error::IllegalMove {
                            player: "black",
                            msg: format!("two cells in column {c} in one move"),
                        });
                    }
                }
                let side = self.side as usize;
                for &(r, c) in cells {
                    if self.cells.insert((r, c)) {
                        self.row_cells.entry(r).or_insert_with(|| vec![false; side])[c as usize] =
                            true;
                    }
                }
                self.black_moves += 1;
            }
        }
        Ok(())
    }
}

pub trait WhiteStrategy {
    fn choose(&mut self, state: &PawnGameState) -> WhiteMove;
}

pub trait BlackStrategy {
    fn choose(&mut self, state: &PawnGameState) -> BlackMove;
}

/// White's greedy strategy: wait (pass) while the most recent pawn is
/// still enabled; otherwise place on the lexicographically least enabled
/// cell whose row and column are both pawn-free.
pub struct GreedyWhite;

impl WhiteStrategy for GreedyWhite {
    fn choose(&mut self, state: &PawnGameState) -> WhiteMove {
        if let Some(&(r, c)) = state.pawns().last() {
            if !state.is_disabled(r, c) {
                return WhiteMove::Pass;
            }
        }
        for row in 0..state.side() {
            if state.row_has_pawn(row) {
                continue;
            }
            for col in 0..state.side() {
                if state.col_has_pawn(col) || state.is_disabled(row, col) {
                    continue;
                }
                return WhiteMove::Place { row, col };
            }
        }
        WhiteMove::Concede
    }
}

/// Budget-respecting random Black: mixes passes, column disables, and
/// cell volleys, all drawn from a seeded stream.
pub struct RandomBlack {
    rng: SplitMix64,
}

impl RandomBlack {
    pub fn new(seed: u64) -> Self {
        RandomBlack {
            rng: SplitMix64::new(seed),
        }
    }
}

impl BlackStrategy for RandomBlack {
    fn choose(&mut self, state: &PawnGameState) -> BlackMove {
        if state.black_exhausted() {
            return BlackMove::Pass;
        }
        let roll = self.rng.below(10);
        if roll == 0 {
            return BlackMove::Pass;
        }
        if roll < 5 {
            let col = self.rng.below(state.side() as u64) as u32;
            return BlackMove::DisableColumn(col);
        }
        let mut cells = Vec::new();
        for col in 0..state.side() {
            if self.rng.chance(1, 2) {
                let row = self.rng.below(state.side() as u64) as u32;
                cells.push((row, col));
            }
        }
        if cells.is_empty() {
            BlackMove::Pass
        } else {
            BlackMove::DisableCells(cells)
        }
    }
}

/// Deterministic column flood: disables the column of White's newest
/// pawn, else the lowest still-enabled column.
pub struct FloodBlack;

impl BlackStrategy for FloodBlack {
    fn choose(&mut self, state: &PawnGameState) -> BlackMove {
        if state.black_exhausted() {
            return BlackMove::Pass;
        }
        for &(_, c) in state.pawns().iter().rev() {
            if !state.disabled_col_flags[c as usize] {
                return BlackMove::DisableColumn(c);
            }
        }
        (0..state.side())
            .find(|&c| !state.disabled_col_flags[c as usize])
            .map(BlackMove::DisableColumn)
            .unwrap_or(BlackMove::Pass)
    }
}

/// The machine-driven blind Black. Its whole move queue is precomputed
/// from one enumeration pass: programs shorter than k in table order,
/// where a program that halts on the empty condition with a fresh output
/// of length k+d disables that column, and a program that halts on every
/// condition of length k+d disables the cells (p, z) wherever its output
/// on z is the marker bit 0 followed by a row label p of length k+d. The
/// two feeds contribute fewer than 2^k moves each.
#[derive(Clone)]
pub struct BlindBlack {
    queue: std::collections::VecDeque<BlackMove>,
}

impl BlindBlack {
    pub fn remaining_moves(&self) -> usize {
        self.queue.len()
    }
}

pub fn blind_black(machine: &dyn ToyMachine, budget: u64, k: u32, d: u32) -> Result<BlindBlack> {
    if k + d > 13 {
        return Err(Error::ResourceLimit(format!(
            "grid side 2^{} beyond desk scale",
            k + d
        )));
    }
    let side_len = (k + d) as usize;
    let mut queue = std::collections::VecDeque::new();
    let mut seen_columns: HashSet<u64> = HashSet::new();
    if k > 0 {
        let conditions: Vec<BitString> = BitString::all_of_length(side_len).collect();
        for q in crate::approximator::enumerate_programs(k - 1) {
            if let Some(x) = machine.eval(&q, &BitString::empty(), budget).halted() {
                if x.len() == side_len {
                    let col = x.value().expect("side fits in a word") as u64;
                    if seen_columns.insert(col) {
                        queue.push_back(BlackMove::DisableColumn(col as u32));
                    }
                }
            }
            let mut cells = Vec::new();
            let mut total = true;
            for z in &conditions {
                match machine.eval(&q, z, budget).halted() {
                    None => {
                        total = false;
                        break;
                    }
                    Some(y) => {
                        if y.len() == side_len + 1 && y.bit(0) == 0 {
                            let row = y.suffix_from(1).value().unwrap() as u32;
                            let col = z.value().unwrap() as u32;
                            cells.push((row, col));
                        }
                    }
                }
            }
            if total && !cells.is_empty() {
                queue.push_back(BlackMove::DisableCells(cells));
            }
        }
    }
    Ok(BlindBlack { queue })
}

impl BlackStrategy for BlindBlack {
    fn choose(&mut self, state: &PawnGameState) -> BlackMove {
        if state.black_exhausted() {
            return BlackMove::Pass;
        }
        self.queue.pop_front().unwrap_or(BlackMove::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameResult {
    WhiteSurvives,
    WhiteLoses { turn: u32 },
}

#[derive(Clone, Debug)]
pub struct GameOutcome {
    pub result: GameResult,
    pub trace: Vec<String>,
    pub final_state: PawnGameState,
}

fn render_white(mv: &WhiteMove) -> String {
    match mv {
        WhiteMove::Pass => "W pass".into(),
        WhiteMove::Place { row, col } => format!("W place {row} {col}"),
        WhiteMove::Concede => "W concede".into(),
    }
}

fn render_black(mv: &BlackMove) -> String {
    match mv {
        BlackMove::Pass => "B pass".into(),
        BlackMove::DisableColumn(c) => format!("B col {c}"),
        BlackMove::DisableCells(cells) => {
            let mut out = String::from("B cells");
            for (r, c) in cells {
                out.push_str(&format!(" ({r},{c})"));
            }
            out
        }
    }
}

/// Alternating play, White first. Ends as white-survives when Black's
/// budget is out and White passed (the board is stable), or after the
/// round cap with White alive (Black idles with budget left).
pub fn pawn_game_run(
    k: u32,
    d: u32,
    white: &mut dyn WhiteStrategy,
    black: &mut dyn BlackStrategy,
) -> Result<GameOutcome> {
    let mut state = PawnGameState::new(k, d)?;
    let round_cap = 4 * (1u32 << (k + 1)) + 16;
    let mut trace = Vec::new();
    for turn in 1..=round_cap {
        let wm = white.choose(&state);
        state.apply_white(&wm)?;
        trace.push(render_white(&wm));
        if matches!(wm, WhiteMove::Concede) || state.white_lost() {
            return Ok(GameOutcome {
                result: GameResult::WhiteLoses { turn },
                trace,
                final_state: state,
            });
        }
        let white_passed = matches!(wm, WhiteMove::Pass);

        let bm = black.choose(&state);
        state.apply_black(&bm)?;
        trace.push(render_black(&bm));

        if state.black_exhausted() && white_passed && matches!(bm, BlackMove::Pass) {
            break;
        }
    }
    Ok(GameOutcome {
        result: GameResult::WhiteSurvives,
        trace,
        final_state: state,
    })
}
