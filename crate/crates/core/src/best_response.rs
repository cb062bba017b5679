//! Exact best responses and exploitability by full enumeration with card removal.

use std::fmt;

use crate::game::Game;
use crate::solver::{traverse, Chance, NoRecord, Policy};

/// Best-response values against a profile, in chips per game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExploitabilityReport {
    /// b_1(σ_2): what a best-responding player 1 wins against σ_2.
    pub b1: f64,
    /// b_2(σ_1).
    pub b2: f64,
    pub epsilon: f64,
    /// ε in milli-blinds per game.
    pub epsilon_mbg: f64,
}

impl ExploitabilityReport {
    pub const CSV_HEADER: &'static str = "b1,b2,epsilon,epsilon_mbg";

    pub fn csv_row(&self) -> String {
        format!("{:.12},{:.12},{:.12},{:.6}", self.b1, self.b2, self.epsilon, self.epsilon_mbg)
    }
}

impl fmt::Display for ExploitabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "b1 = {:.9} chips, b2 = {:.9} chips, exploitability = {:.9} chips/g ({:.3} mb/g)",
            self.b1, self.b2, self.epsilon, self.epsilon_mbg
        )
    }
}

/// Value of the best response of `player` to the opponent's part of `profile`.
/// Only the opponent's rows of `profile` are read.
pub fn best_response_value<P: Policy>(game: &Game, profile: &P, player: usize) -> f64 {
    traverse(game, profile, player, true, Chance::Exact, &mut NoRecord)
}

/// Expected value of `player` when both follow `profile`.
pub fn expected_value<P: Policy>(game: &Game, profile: &P, player: usize) -> f64 {
    traverse(game, profile, player, false, Chance::Exact, &mut NoRecord)
}

pub fn exploitability<P: Policy>(game: &Game, profile: &P) -> ExploitabilityReport {
    let b1 = best_response_value(game, profile, 0);
    let b2 = best_response_value(game, profile, 1);
    let epsilon = b1 + b2;
    ExploitabilityReport {
        b1,
        b2,
        epsilon,
        epsilon_mbg: epsilon / game.config.blind_unit as f64 * 1000.0,
    }
}
