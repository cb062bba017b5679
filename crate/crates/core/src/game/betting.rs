//! Fixed-limit betting rules shared by histories and the compiled tree.

use std::fmt;

use crate::config::GameConfig;
use crate::error::{Error, Result};

/// A betting action. `Call` is a check when nothing is owed, `Raise` a bet when no bet is open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Fold,
    Call,
    Raise,
}

impl Action {
    /// Trace letter: lower case for player 1, upper case for player 2.
    pub fn letter(self, player: usize) -> char {
        let c = match self {
            Action::Fold => 'f',
            Action::Call => 'c',
            Action::Raise => 'r',
        };
        if player == 0 {
            c
        } else {
            c.to_ascii_uppercase()
        }
    }

    pub fn from_letter(c: char) -> Option<(Action, usize)> {
        let player = usize::from(c.is_ascii_uppercase());
        let action = match c.to_ascii_lowercase() {
            'f' => Action::Fold,
            'c' => Action::Call,
            'r' => Action::Raise,
            _ => return None,
        };
        Some((action, player))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Fold => "fold",
            Action::Call => "call",
            Action::Raise => "raise",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BettingStatus {
    /// `to_act` must choose an action.
    Acting,
    /// The round closed; the next round's community cards are due.
    AwaitingCards,
    Folded { folder: usize },
    Showdown,
}

/// Chip and turn bookkeeping of a hand, independent of the cards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BettingState {
    pub round: usize,
    pub contrib: [i64; 2],
    pub raises: u8,
    pub actions_in_round: u8,
    pub to_act: usize,
    pub status: BettingStatus,
}

impl BettingState {
    pub fn new(config: &GameConfig) -> Self {
        BettingState {
            round: 0,
            contrib: [config.ante, config.ante],
            raises: 0,
            actions_in_round: 0,
            to_act: 0,
            status: BettingStatus::Acting,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(
            self.status,
            BettingStatus::Folded { .. } | BettingStatus::Showdown
        )
    }

    fn owed(&self) -> i64 {
        self.contrib[1 - self.to_act] - self.contrib[self.to_act]
    }

    pub fn legal_actions(&self, config: &GameConfig) -> Result<Vec<Action>> {
        if self.status != BettingStatus::Acting {
            return Err(Error::Contract(format!(
                "no player acts in betting status {:?}",
                self.status
            )));
        }
        let mut out = Vec::with_capacity(3);
        if self.owed() > 0 {
            out.push(Action::Fold);
        }
        out.push(Action::Call);
        if self.raises < config.max_raises_per_round {
            out.push(Action::Raise);
        }
        Ok(out)
    }

    pub fn apply(&self, action: Action, config: &GameConfig) -> Result<BettingState> {
        let legal = self.legal_actions(config)?;
        if !legal.contains(&action) {
            return Err(Error::IllegalAction {
                action: action.to_string(),
                at: format!("round {} after {} actions", self.round, self.actions_in_round),
            });
        }
        let me = self.to_act;
        let mut next = self.clone();
        next.actions_in_round += 1;
        match action {
            Action::Fold => next.status = BettingStatus::Folded { folder: me },
            Action::Call => {
                let owed = self.owed();
                next.contrib[me] = self.contrib[1 - me];
                if owed > 0 || self.actions_in_round > 0 {
                    if self.round + 1 == config.num_rounds() {
                        next.status = BettingStatus::Showdown;
                    } else {
                        next.status = BettingStatus::AwaitingCards;
                    }
                } else {
                    next.to_act = 1 - me;
                }
            }
            Action::Raise => {
                next.contrib[me] = self.contrib[1 - me] + config.bet_size_per_round[self.round];
                next.raises += 1;
                next.to_act = 1 - me;
            }
        }
        Ok(next)
    }

    /// Starts the next round after its community cards are dealt.
    pub fn next_round(&self) -> Result<BettingState> {
        if self.status != BettingStatus::AwaitingCards {
            return Err(Error::Contract("betting round is still open".into()));
        }
        Ok(BettingState {
            round: self.round + 1,
            raises: 0,
            actions_in_round: 0,
            to_act: 0,
            status: BettingStatus::Acting,
            contrib: self.contrib,
        })
    }

    /// Chips won by `player` at a terminal state when the showdown (if any)
    /// ends with `showdown` from player 1's point of view (+1, 0, -1).
    pub fn payoff(&self, player: usize, showdown: i32) -> i64 {
        match self.status {
            BettingStatus::Folded { folder } => {
                if folder == player {
                    -self.contrib[player]
                } else {
                    self.contrib[folder]
                }
            }
            BettingStatus::Showdown => {
                let stake = self.contrib[0];
                let sign = if player == 0 { showdown } else { -showdown };
                stake * sign as i64
            }
            _ => 0,
        }
    }
}
