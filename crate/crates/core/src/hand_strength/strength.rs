//! Exact hand-strength outcome vectors by exhaustive rollout.
//!
//! At the last round a hand is compared against every opponent hole that
//! shares no card with it; earlier rounds average their children uniformly
//! over the community cards still to come.

use std::io::Write;

use crate::cards::{mask_of, Card};
use crate::config::GameConfig;
use crate::error::{contract, Result};
use crate::game::hands::{HandSpace, BLOCKED};
use crate::hand_strength::rank::{compare, rank_hand, Outcome};

/// `[lose, draw, win]` frequencies.
pub type OutcomeVector = [f64; 3];

/// One outcome row per round up to the hand's round.
#[derive(Clone, Debug, PartialEq)]
pub struct StrengthTensor {
    pub rows: Vec<OutcomeVector>,
}

impl StrengthTensor {
    pub fn num_rounds(&self) -> usize {
        self.rows.len()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Win/draw/loss frequencies of `hole` on the final `board` against a uniform
/// opponent hole drawn from the remaining cards.
pub fn terminal_outcome_vector(hole: &[Card], board: &[Card], config: &GameConfig) -> Result<OutcomeVector> {
    let expected = config.community_through(config.num_rounds() - 1);
    if board.len() != expected {
        return contract(format!("terminal board needs {expected} cards, got {}", board.len()));
    }
    let ns = config.num_suits;
    let used = mask_of(hole, ns) | mask_of(board, ns);
    if used.count_ones() as usize != hole.len() + board.len() {
        return contract("hole and board overlap");
    }
    let mine: Vec<Card> = hole.iter().chain(board).copied().collect();
    let my_rank = rank_hand(&mine, config)?;
    let free: Vec<Card> = (0..config.deck_size())
        .map(|i| Card::from_id(i, ns))
        .filter(|c| used & c.mask(ns) == 0)
        .collect();
    let mut counts = [0u64; 3];
    for opp in crate::cards::combinations(&free, config.num_hole_cards) {
        let theirs: Vec<Card> = opp.iter().chain(board).copied().collect();
        let slot = match compare(my_rank, rank_hand(&theirs, config)?) {
            Outcome::Lose => 0,
            Outcome::Draw => 1,
            Outcome::Win => 2,
        };
        counts[slot] += 1;
    }
    let total = (counts[0] + counts[1] + counts[2]) as f64;
    Ok(counts.map(|c| c as f64 / total))
}

/// Outcome vectors of every (board, hole) pair in every round.
#[derive(Clone, Debug)]
pub struct StrengthTable {
    /// `rows[round][board][hole]`; blocked entries are zero.
    rows: Vec<Vec<Vec<OutcomeVector>>>,
    /// A (board, hole) representative per class per round.
    reps: Vec<Vec<(usize, u32)>>,
}

impl StrengthTable {
    pub fn build(space: &HandSpace) -> Self {
        let rounds = space.boards.len();
        let last = rounds - 1;
        let n = space.num_holes();
        let mut rows: Vec<Vec<Vec<OutcomeVector>>> = vec![Vec::new(); rounds];
        let ones = vec![1.0; n];
        let mut sums = vec![[0.0; 3]; n];
        let mut final_rows = Vec::with_capacity(space.boards[last].len());
        for (bi, b) in space.boards[last].iter().enumerate() {
            let mut w = vec![0.0; n];
            for &h in &b.valid {
                w[h as usize] = ones[h as usize];
            }
            space.showdown_sums(bi, &w, &mut sums);
            let mut out = vec![[0.0; 3]; n];
            for &h in &b.valid {
                let [weaker, equal, stronger] = sums[h as usize];
                let total = weaker + equal + stronger;
                out[h as usize] = [stronger / total, equal / total, weaker / total];
            }
            final_rows.push(out);
        }
        rows[last] = final_rows;
        for r in (0..last).rev() {
            let mut level = Vec::with_capacity(space.boards[r].len());
            for b in &space.boards[r] {
                let mut out = vec![[0.0; 3]; n];
                for &h in &b.valid {
                    let mut acc = [0.0; 3];
                    let mut count = 0usize;
                    for &c in &b.children {
                        if space.boards[r + 1][c].class_of[h as usize] == BLOCKED {
                            continue;
                        }
                        let child = rows[r + 1][c][h as usize];
                        for k in 0..3 {
                            acc[k] += child[k];
                        }
                        count += 1;
                    }
                    out[h as usize] = acc.map(|x| x / count as f64);
                }
                level.push(out);
            }
            rows[r] = level;
        }
        let mut reps = Vec::with_capacity(rounds);
        for r in 0..rounds {
            let mut rep = vec![(usize::MAX, 0u32); space.num_classes(r)];
            for (bi, b) in space.boards[r].iter().enumerate() {
                for &h in &b.valid {
                    let c = b.class_of[h as usize] as usize;
                    if rep[c].0 == usize::MAX {
                        rep[c] = (bi, h);
                    }
                }
            }
            reps.push(rep);
        }
        StrengthTable { rows, reps }
    }

    pub fn row(&self, round: usize, board: usize, hole: u32) -> OutcomeVector {
        self.rows[round][board][hole as usize]
    }

    pub fn representative(&self, round: usize, class: u32) -> (usize, u32) {
        self.reps[round][class as usize]
    }

    /// Outcome row of `class` in its own round.
    pub fn class_row(&self, round: usize, class: u32) -> OutcomeVector {
        let (b, h) = self.representative(round, class);
        self.row(round, b, h)
    }

    /// Rows for the class and each of its predecessors, earliest round first.
    pub fn tensor(&self, space: &HandSpace, round: usize, class: u32) -> StrengthTensor {
        let (board, hole) = self.representative(round, class);
        let rows = (0..=round)
            .map(|r| self.row(r, space.ancestor(round, board, r), hole))
            .collect();
        StrengthTensor { rows }
    }

    /// CSV with header `class,round,w_l,w_d,w_w`, one line per class and row.
    pub fn write_csv<W: Write>(&self, space: &HandSpace, round: usize, out: &mut W) -> Result<()> {
        writeln!(out, "class,round,w_l,w_d,w_w")?;
        for class in 0..space.num_classes(round) as u32 {
            for (r, row) in self.tensor(space, round, class).rows.iter().enumerate() {
                writeln!(out, "{class},{},{},{},{}", r + 1, row[0], row[1], row[2])?;
            }
        }
        Ok(())
    }
}

/// Distinct suit-isomorphism classes of one player's view at `round`.
pub fn count_isomorphism_classes(space: &HandSpace, round: usize) -> usize {
    space.num_classes(round)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::parse_cards;

    #[test]
    fn kuhn_rows() {
        let cfg = GameConfig::kuhn();
        let space = HandSpace::build(&cfg);
        let table = StrengthTable::build(&space);
        assert_eq!(table.row(0, 0, 0), [1.0, 0.0, 0.0]);
        assert_eq!(table.row(0, 0, 1), [0.5, 0.0, 0.5]);
        assert_eq!(table.row(0, 0, 2), [0.0, 0.0, 1.0]);
        let q = parse_cards("Q", &cfg).unwrap();
        assert_eq!(terminal_outcome_vector(&q, &[], &cfg).unwrap(), [0.5, 0.0, 0.5]);
        assert_eq!(count_isomorphism_classes(&space, 0), 3);
    }

    #[test]
    fn nuts_never_lose() {
        let cfg = GameConfig::numeral20();
        // A-T-9 of spades is the best possible three-card hand
        let hole = parse_cards("AsTs", &cfg).unwrap();
        let board = parse_cards("9s7h", &cfg).unwrap();
        let w = terminal_outcome_vector(&hole, &board, &cfg).unwrap();
        assert_eq!(w[0], 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_matches_direct_definition() {
        let cfg = GameConfig::numeral20();
        let space = HandSpace::build(&cfg);
        let table = StrengthTable::build(&space);
        for (bi, b) in space.boards[2].iter().enumerate().step_by(37) {
            let board: Vec<Card> = b
                .round_masks
                .iter()
                .flat_map(|&m| crate::hand_strength::canonical::cards_of_mask(m, 4))
                .collect();
            for &h in b.valid.iter().step_by(11) {
                let direct = terminal_outcome_vector(&space.holes[h as usize], &board, &cfg).unwrap();
                assert_eq!(table.row(2, bi, h), direct);
            }
        }
    }

    #[test]
    fn terminal_requires_full_board() {
        let cfg = GameConfig::numeral20();
        let hole = parse_cards("AsTs", &cfg).unwrap();
        assert!(terminal_outcome_vector(&hole, &parse_cards("9s", &cfg).unwrap(), &cfg).is_err());
    }
}
