//! Explicit game histories: the reference semantics of the engine.
//!
//! The solvers work on the compiled [`BettingTree`](super::tree::BettingTree)
//! plus card tables; histories here are used for keys, rule checks and the
//! small exact oracles in tests.

use std::fmt;

use super::betting::{Action, BettingState, BettingStatus};
use crate::cards::{combinations, mask_of, Card};
use crate::config::GameConfig;
use crate::error::{contract, Error, Result};
use crate::hand_strength::canonical::{canonicalize, CanonicalHand};
use crate::hand_strength::rank::{compare, rank_hand, Outcome};

/// A move: a chance deal or a player's betting action.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Hole cards (player 1's then player 2's) at the root, community cards later.
    Deal(Vec<Card>),
    Bet(Action),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actor {
    Chance,
    Player(usize),
    Terminal,
}

/// Betting actions per round; the player of each action follows from its
/// position because player 1 opens every round.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace(pub Vec<Vec<Action>>);

impl Trace {
    pub fn round(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn parse(text: &str) -> Result<Trace> {
        let rounds = text
            .split('/')
            .map(|r| {
                r.chars()
                    .map(|c| {
                        Action::from_letter(c)
                            .map(|(a, _)| a)
                            .ok_or_else(|| Error::Parse(format!("bad action letter {c:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trace(rounds))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, actions) in self.0.iter().enumerate() {
            if r > 0 {
                f.write_str("/")?;
            }
            for (i, a) in actions.iter().enumerate() {
                write!(f, "{}", a.letter(i % 2))?;
            }
        }
        Ok(())
    }
}

/// What one player knows: their canonical cards and the public betting.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InfoSetKey {
    pub player: usize,
    pub hand: CanonicalHand,
    pub trace: Trace,
}

impl InfoSetKey {
    pub fn round(&self) -> usize {
        self.trace.round()
    }

    pub fn text(&self, config: &GameConfig) -> String {
        format!("P{}:{}:{}", self.player + 1, self.hand.notation(config), self.trace)
    }

    /// Inverse of [`text`](Self::text); the hand is re-canonicalized.
    pub fn parse(text: &str, config: &GameConfig) -> Result<InfoSetKey> {
        let bad = || Error::Parse(format!("bad infoset key {text:?}"));
        let mut parts = text.splitn(3, ':');
        let player = match parts.next() {
            Some("P1") => 0,
            Some("P2") => 1,
            _ => return Err(bad()),
        };
        let hand = parts.next().ok_or_else(bad)?;
        let trace = Trace::parse(parts.next().ok_or_else(bad)?)?;
        let rounds = hand
            .split('|')
            .map(|r| crate::cards::parse_cards(r, config))
            .collect::<Result<Vec<_>>>()?;
        if rounds.len() != trace.0.len() {
            return Err(bad());
        }
        Ok(InfoSetKey {
            player,
            hand: canonicalize(&rounds, config.num_suits),
            trace,
        })
    }
}

/// Infosets of one player sharing a betting trace (chance segments elided).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InfoBlockKey {
    pub player: usize,
    pub round: usize,
    pub trace: Trace,
}

impl fmt::Display for InfoBlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}:{}", self.player + 1, self.trace)
    }
}

pub fn infoblock_key(key: &InfoSetKey) -> InfoBlockKey {
    InfoBlockKey {
        player: key.player,
        round: key.round(),
        trace: key.trace.clone(),
    }
}

/// A position in the game: the chance prefix, the betting so far and whose turn it is.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HistoryNode {
    pub hole: [Vec<Card>; 2],
    /// Community cards dealt before round `r + 1`.
    pub board: Vec<Vec<Card>>,
    pub betting: BettingState,
    pub trace: Trace,
    dealt: bool,
}

impl HistoryNode {
    pub fn root(config: &GameConfig) -> Self {
        HistoryNode {
            hole: [vec![], vec![]],
            board: vec![],
            betting: BettingState::new(config),
            trace: Trace(vec![vec![]]),
            dealt: false,
        }
    }

    /// Convenience: the root followed by a hole-card deal.
    pub fn dealt(config: &GameConfig, p1: &[Card], p2: &[Card]) -> Result<Self> {
        let cards: Vec<Card> = p1.iter().chain(p2).copied().collect();
        Self::root(config).apply(&Move::Deal(cards), config)
    }

    pub fn to_act(&self) -> Actor {
        if !self.dealt {
            return Actor::Chance;
        }
        match self.betting.status {
            BettingStatus::Acting => Actor::Player(self.betting.to_act),
            BettingStatus::AwaitingCards => Actor::Chance,
            _ => Actor::Terminal,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.to_act() == Actor::Terminal
    }

    pub fn round(&self) -> usize {
        self.betting.round
    }

    fn used_mask(&self, config: &GameConfig) -> u64 {
        let ns = config.num_suits;
        self.hole
            .iter()
            .chain(self.board.iter())
            .fold(0, |m, cards| m | mask_of(cards, ns))
    }

    pub fn legal_actions(&self, config: &GameConfig) -> Result<Vec<Action>> {
        match self.to_act() {
            Actor::Player(_) => self.betting.legal_actions(config),
            other => contract(format!("legal_actions at a {other:?} node")),
        }
    }

    /// Cards still in the deck.
    pub fn remaining_cards(&self, config: &GameConfig) -> Vec<Card> {
        let used = self.used_mask(config);
        (0..config.deck_size())
            .map(|id| Card::from_id(id, config.num_suits))
            .filter(|c| used & c.mask(config.num_suits) == 0)
            .collect()
    }

    /// Every legal chance move with its probability (uniform).
    pub fn chance_outcomes(&self, config: &GameConfig) -> Result<Vec<(Move, f64)>> {
        if self.to_act() != Actor::Chance {
            return contract("chance_outcomes at a non-chance node");
        }
        let deck = self.remaining_cards(config);
        let moves: Vec<Move> = if !self.dealt {
            let h = config.num_hole_cards;
            let mut out = Vec::new();
            for p1 in combinations(&deck, h) {
                let rest: Vec<Card> = deck.iter().copied().filter(|c| !p1.contains(c)).collect();
                for p2 in combinations(&rest, h) {
                    out.push(Move::Deal(p1.iter().chain(&p2).copied().collect()));
                }
            }
            out
        } else {
            let k = config.community_per_round[self.betting.round];
            combinations(&deck, k).into_iter().map(Move::Deal).collect()
        };
        let p = 1.0 / moves.len() as f64;
        Ok(moves.into_iter().map(|m| (m, p)).collect())
    }

    pub fn apply(&self, mv: &Move, config: &GameConfig) -> Result<HistoryNode> {
        let illegal = |why: &str| Error::IllegalAction {
            action: format!("{mv:?}"),
            at: format!("{} ({why})", self.describe(config)),
        };
        let mut next = self.clone();
        match (self.to_act(), mv) {
            (Actor::Chance, Move::Deal(cards)) => {
                let ns = config.num_suits;
                let mask = mask_of(cards, ns);
                let expected = if self.dealt {
                    config.community_per_round[self.betting.round]
                } else {
                    2 * config.num_hole_cards
                };
                if cards.len() != expected || mask.count_ones() as usize != cards.len() {
                    return Err(illegal("wrong number of distinct cards"));
                }
                if cards
                    .iter()
                    .any(|c| c.rank >= config.num_ranks || c.suit >= config.num_suits)
                {
                    return Err(illegal("card outside the deck"));
                }
                if mask & self.used_mask(config) != 0 {
                    return Err(illegal("card already dealt"));
                }
                if self.dealt {
                    let mut sorted = cards.clone();
                    sorted.sort();
                    next.board.push(sorted);
                    next.betting = self.betting.next_round()?;
                    next.trace.0.push(vec![]);
                } else {
                    let h = config.num_hole_cards;
                    let mut p1 = cards[..h].to_vec();
                    let mut p2 = cards[h..].to_vec();
                    p1.sort();
                    p2.sort();
                    next.hole = [p1, p2];
                    next.dealt = true;
                }
            }
            (Actor::Player(_), Move::Bet(action)) => {
                next.betting = self
                    .betting
                    .apply(*action, config)
                    .map_err(|_| illegal("not a legal betting action"))?;
                next.trace.0.last_mut().expect("trace has a round").push(*action);
            }
            _ => return Err(illegal("move kind does not match the node")),
        }
        Ok(next)
    }

    pub fn apply_action(&self, action: Action, config: &GameConfig) -> Result<HistoryNode> {
        self.apply(&Move::Bet(action), config)
    }

    /// The player's view of the cards: hole cards, then each dealt community round.
    pub fn view(&self, player: usize) -> Vec<Vec<Card>> {
        std::iter::once(self.hole[player].clone())
            .chain(self.board.iter().cloned())
            .collect()
    }

    /// Chips won by `player` at a terminal node.
    pub fn utility(&self, player: usize, config: &GameConfig) -> Result<i64> {
        if !self.is_terminal() {
            return contract("utility at a non-terminal node");
        }
        let showdown = match self.betting.status {
            BettingStatus::Showdown => {
                let board: Vec<Card> = self.board.iter().flatten().copied().collect();
                let hand = |p: usize| -> Result<_> {
                    let cards: Vec<Card> = self.hole[p].iter().chain(&board).copied().collect();
                    rank_hand(&cards, config)
                };
                match compare(hand(0)?, hand(1)?) {
                    Outcome::Win => 1,
                    Outcome::Draw => 0,
                    Outcome::Lose => -1,
                }
            }
            _ => 0,
        };
        Ok(self.betting.payoff(player, showdown))
    }

    pub fn infoset_key(&self, player: usize, config: &GameConfig) -> InfoSetKey {
        InfoSetKey {
            player,
            hand: canonicalize(&self.view(player), config.num_suits),
            trace: self.trace.clone(),
        }
    }

    pub fn describe(&self, config: &GameConfig) -> String {
        let cards = |c: &[Card]| crate::cards::cards_notation(c, config);
        let board: Vec<String> = self.board.iter().map(|b| cards(b)).collect();
        format!(
            "[{} vs {} | {}] {}",
            cards(&self.hole[0]),
            cards(&self.hole[1]),
            board.join(" "),
            self.trace
        )
    }
}

/// Visits every terminal history below `node` with its chance probability.
pub fn for_each_terminal(
    node: &HistoryNode,
    config: &GameConfig,
    f: &mut dyn FnMut(&HistoryNode, f64),
) -> Result<()> {
    fn go(
        node: &HistoryNode,
        p: f64,
        config: &GameConfig,
        f: &mut dyn FnMut(&HistoryNode, f64),
    ) -> Result<()> {
        match node.to_act() {
            Actor::Terminal => f(node, p),
            Actor::Chance => {
                for (mv, q) in node.chance_outcomes(config)? {
                    go(&node.apply(&mv, config)?, p * q, config, f)?;
                }
            }
            Actor::Player(_) => {
                for a in node.legal_actions(config)? {
                    go(&node.apply_action(a, config)?, p, config, f)?;
                }
            }
        }
        Ok(())
    }
    go(node, 1.0, config, f)
}
