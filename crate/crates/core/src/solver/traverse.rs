//! Vectorized tree walk: one pass over the betting tree per board path, with
//! reach and value vectors indexed by hole combination.
//!
//! Card removal at terminals goes through the inclusion-exclusion sums of
//! [`HandSpace`](crate::game::HandSpace), so a pass costs about
//! `nodes × boards × holes` instead of `nodes × deals`. With exact chance only
//! one board per suit orbit is walked: class-based policies keep every reach
//! vector symmetric under the board's stabilizer, so the other orbit members'
//! values are permutations of the representative's.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use super::table::Policy;
use crate::cards::Card;
use crate::game::{Game, NodeKind};

/// What a recorder sees at each of the traversing player's decision nodes.
pub struct Visit<'a> {
    pub node: usize,
    pub round: usize,
    pub board: usize,
    /// Own holes evaluated here.
    pub holes: &'a [u32],
    /// Class id by hole id on this board.
    pub classes: &'a [u32],
    /// Own reach by hole id.
    pub own_reach: &'a [f64],
    /// `holes.len() × actions`, row per entry of `holes`.
    pub strategy: &'a [f64],
    pub action_values: &'a [f64],
    pub values: &'a [f64],
    /// Number of suit-isomorphic board paths this visit stands for.
    pub weight: f64,
}

pub trait Recorder {
    fn visit(&mut self, visit: &Visit<'_>);
}

pub struct NoRecord;

impl Recorder for NoRecord {
    fn visit(&mut self, _: &Visit<'_>) {}
}

/// How chance is handled during a pass.
#[derive(Clone, Copy)]
pub enum Chance<'a> {
    /// Every deal, weighted by its probability.
    Exact,
    /// Only the sampled deals, each weighted `1 / budget`.
    Sampled(&'a DealSample),
}

#[derive(Clone, Debug, Default)]
struct SampleNode {
    /// (P1 hole, P2 hole, multiplicity) for sampled deals through this board.
    pairs: Vec<(u32, u32, f64)>,
    holes: [Vec<u32>; 2],
    children: Vec<usize>,
}

/// A multiset of sampled deals arranged along the board tree.
#[derive(Clone, Debug)]
pub struct DealSample {
    budget: usize,
    levels: Vec<BTreeMap<usize, SampleNode>>,
}

impl DealSample {
    /// Draws `budget` deals uniformly with a seeded generator.
    pub fn draw<R: Rng + ?Sized>(game: &Game, budget: usize, rng: &mut R) -> Self {
        let cfg = &game.config;
        let ns = cfg.num_suits;
        let mut deck: Vec<Card> = (0..cfg.deck_size()).map(|i| Card::from_id(i, ns)).collect();
        let hole_index: HashMap<u64, u32> = game
            .hands
            .hole_masks
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i as u32))
            .collect();
        let h = cfg.num_hole_cards;
        let needed = 2 * h + cfg.community_through(cfg.num_rounds() - 1);
        let mut deals = Vec::with_capacity(budget);
        for _ in 0..budget {
            let (picked, _) = deck.partial_shuffle(rng, needed);
            let mask = |cards: &[Card]| cards.iter().fold(0u64, |m, c| m | c.mask(ns));
            let p1 = hole_index[&mask(&picked[..h])];
            let p2 = hole_index[&mask(&picked[h..2 * h])];
            let mut board = 0usize;
            let mut at = 2 * h;
            for r in 1..cfg.num_rounds() {
                let k = cfg.community_per_round[r - 1];
                let m = mask(&picked[at..at + k]);
                at += k;
                board = *game.hands.boards[r - 1][board]
                    .children
                    .iter()
                    .find(|&&c| game.hands.boards[r][c].round_masks[r - 1] == m)
                    .expect("board exists");
            }
            deals.push((p1, p2, board));
        }
        DealSample::from_deals(game, budget, &deals)
    }

    /// Builds a sample from explicit `(P1 hole, P2 hole, final board)` deals.
    pub fn from_deals(game: &Game, budget: usize, deals: &[(u32, u32, usize)]) -> Self {
        let rounds = game.num_rounds();
        let mut counts: Vec<BTreeMap<usize, BTreeMap<(u32, u32), f64>>> = vec![BTreeMap::new(); rounds];
        for &(p1, p2, fin) in deals {
            let mut b = fin;
            for r in (0..rounds).rev() {
                *counts[r].entry(b).or_default().entry((p1, p2)).or_default() += 1.0;
                if r > 0 {
                    b = game.hands.boards[r][b].parent;
                }
            }
        }
        let mut levels: Vec<BTreeMap<usize, SampleNode>> = Vec::with_capacity(rounds);
        for level in counts {
            let mut out = BTreeMap::new();
            for (b, pairs) in level {
                let mut node = SampleNode {
                    pairs: pairs.into_iter().map(|((a, c), n)| (a, c, n)).collect(),
                    ..Default::default()
                };
                for p in 0..2 {
                    let mut hs: Vec<u32> = node.pairs.iter().map(|t| if p == 0 { t.0 } else { t.1 }).collect();
                    hs.sort_unstable();
                    hs.dedup();
                    node.holes[p] = hs;
                }
                out.insert(b, node);
            }
            levels.push(out);
        }
        for r in 1..rounds {
            let keys: Vec<usize> = levels[r].keys().copied().collect();
            for b in keys {
                let parent = game.hands.boards[r][b].parent;
                levels[r - 1].get_mut(&parent).expect("parent sampled").children.push(b);
            }
        }
        DealSample { budget, levels }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Distinct final boards in the sample.
    pub fn boards(&self) -> usize {
        self.levels.last().map_or(0, |l| l.len())
    }
}

/// One traversal for one player.
struct Walker<'a, P: Policy> {
    game: &'a Game,
    policy: &'a P,
    player: usize,
    best: bool,
    chance: Chance<'a>,
    weight: Vec<f64>,
    sums3: Vec<[f64; 3]>,
    sums: Vec<f64>,
    /// Orbit size of the current board path.
    mult: f64,
    /// Only walk the path to this node and its subtree.
    focus: Option<usize>,
}

impl<'a, P: Policy> Walker<'a, P> {
    fn holes(&self, round: usize, board: usize, player: usize) -> &'a [u32] {
        match self.chance {
            Chance::Exact => &self.game.hands.boards[round][board].valid,
            Chance::Sampled(s) => &s.levels[round][&board].holes[player],
        }
    }

    fn wanted(&self, node: usize) -> bool {
        self.focus
            .map_or(true, |f| self.game.tree.on_path_or_below(node, f))
    }

    fn walk<R: Recorder>(&mut self, node: usize, board: usize, own: &[f64], opp: &[f64], rec: &mut R) -> Vec<f64> {
        let game = self.game;
        let n = game.hands.num_holes();
        let tnode = &game.tree.nodes[node];
        let round = tnode.round;
        let mut out = vec![0.0; n];
        match &tnode.kind {
            NodeKind::Decision { player, children, .. } if *player == self.player => {
                let holes = self.holes(round, board, self.player);
                let classes = &game.hands.boards[round][board].class_of;
                let na = children.len();
                let mut strat = Vec::with_capacity(holes.len() * na);
                for &h in holes {
                    strat.extend_from_slice(self.policy.strategy(node, classes[h as usize]));
                }
                let mut av = vec![0.0; holes.len() * na];
                let mut child_own = vec![0.0; n];
                for (a, &child) in children.iter().enumerate() {
                    if !self.wanted(child) {
                        continue;
                    }
                    for (k, &h) in holes.iter().enumerate() {
                        child_own[h as usize] = own[h as usize] * strat[k * na + a];
                    }
                    let v = self.walk(child, board, &child_own, opp, rec);
                    for (k, &h) in holes.iter().enumerate() {
                        av[k * na + a] = v[h as usize];
                    }
                }
                let mut values = vec![0.0; holes.len()];
                for (k, &h) in holes.iter().enumerate() {
                    let row = &av[k * na..(k + 1) * na];
                    let v = if self.best {
                        row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                    } else {
                        row.iter().zip(&strat[k * na..(k + 1) * na]).map(|(v, s)| v * s).sum()
                    };
                    values[k] = v;
                    out[h as usize] = v;
                }
                rec.visit(&Visit {
                    node,
                    round,
                    board,
                    holes,
                    classes,
                    own_reach: own,
                    strategy: &strat,
                    action_values: &av,
                    values: &values,
                    weight: self.mult,
                });
            }
            NodeKind::Decision { children, .. } => {
                let opp_player = 1 - self.player;
                let opp_holes = self.holes(round, board, opp_player);
                let own_holes = self.holes(round, board, self.player);
                let classes = &game.hands.boards[round][board].class_of;
                let mut child_opp = vec![0.0; n];
                for (a, &child) in children.iter().enumerate() {
                    if !self.wanted(child) {
                        continue;
                    }
                    for &h in opp_holes {
                        child_opp[h as usize] = opp[h as usize] * self.policy.strategy(node, classes[h as usize])[a];
                    }
                    let v = self.walk(child, board, own, &child_opp, rec);
                    for &h in own_holes {
                        out[h as usize] += v[h as usize];
                    }
                }
            }
            NodeKind::Chance { next_round, child } => match self.chance {
                Chance::Exact => {
                    let hands = &game.hands;
                    let outer = self.mult;
                    for (rep, members) in &hands.boards[round][board].orbits {
                        self.mult = outer * members.len() as f64;
                        let v = self.walk(*child, *rep, own, opp, rec);
                        for &pi in members {
                            let perm = &hands.hole_perm[pi as usize];
                            for &h in &hands.boards[*next_round][*rep].valid {
                                out[perm[h as usize] as usize] += v[h as usize];
                            }
                        }
                    }
                    self.mult = outer;
                }
                Chance::Sampled(s) => {
                    for &c in &s.levels[round][&board].children {
                        let v = self.walk(*child, c, own, opp, rec);
                        for &h in self.holes(*next_round, c, self.player) {
                            out[h as usize] += v[h as usize];
                        }
                    }
                }
            },
            NodeKind::Fold { folder, contrib } => {
                let u = if *folder == self.player {
                    -contrib[self.player]
                } else {
                    contrib[*folder]
                } as f64;
                let w = self.weight[round];
                match self.chance {
                    Chance::Exact => {
                        game.hands.compatible_sums(round, board, opp, &mut self.sums);
                        for &h in &game.hands.boards[round][board].valid {
                            out[h as usize] = w * u * self.sums[h as usize];
                        }
                    }
                    Chance::Sampled(s) => {
                        for &(p1, p2, count) in &s.levels[round][&board].pairs {
                            let (mine, theirs) = if self.player == 0 { (p1, p2) } else { (p2, p1) };
                            out[mine as usize] += w * count * u * opp[theirs as usize];
                        }
                    }
                }
            }
            NodeKind::Showdown { contrib } => {
                let stake = contrib[0] as f64;
                let w = self.weight[round];
                match self.chance {
                    Chance::Exact => {
                        game.hands.showdown_sums(board, opp, &mut self.sums3);
                        for &h in &game.hands.boards[round][board].valid {
                            let [weaker, _, stronger] = self.sums3[h as usize];
                            out[h as usize] = w * stake * (weaker - stronger);
                        }
                    }
                    Chance::Sampled(s) => {
                        let ranks = &game.hands.final_rank[board];
                        for &(p1, p2, count) in &s.levels[round][&board].pairs {
                            let (mine, theirs) = if self.player == 0 { (p1, p2) } else { (p2, p1) };
                            let sign = match ranks[mine as usize].cmp(&ranks[theirs as usize]) {
                                std::cmp::Ordering::Less => -1.0,
                                std::cmp::Ordering::Equal => 0.0,
                                std::cmp::Ordering::Greater => 1.0,
                            };
                            out[mine as usize] += w * count * stake * sign * opp[theirs as usize];
                        }
                    }
                }
            }
        }
        out
    }
}

/// Runs one pass for `player` and returns the player's expected value
/// (or best-response value when `best` is set). Regret information flows to
/// `rec` at each of the player's decision nodes.
pub fn traverse<P: Policy, R: Recorder>(
    game: &Game,
    policy: &P,
    player: usize,
    best: bool,
    chance: Chance<'_>,
    rec: &mut R,
) -> f64 {
    traverse_focused(game, policy, player, best, chance, None, rec)
}

/// [`traverse`] restricted to the root-to-`focus` path and the subtree below
/// `focus`. Values recorded at `focus` and below are exact; those at its
/// ancestors and the returned total are not.
pub fn traverse_focused<P: Policy, R: Recorder>(
    game: &Game,
    policy: &P,
    player: usize,
    best: bool,
    chance: Chance<'_>,
    focus: Option<usize>,
    rec: &mut R,
) -> f64 {
    let n = game.hands.num_holes();
    let weight = match chance {
        Chance::Exact => game.hands.tuples.iter().map(|t| 1.0 / t).collect(),
        Chance::Sampled(s) => vec![1.0 / s.budget as f64; game.num_rounds()],
    };
    let mut walker = Walker {
        game,
        policy,
        player,
        best,
        chance,
        weight,
        sums3: vec![[0.0; 3]; n],
        sums: vec![0.0; n],
        mult: 1.0,
        focus,
    };
    if let Chance::Sampled(s) = chance {
        if s.levels.first().map_or(true, |l| l.is_empty()) {
            return 0.0;
        }
    }
    let ones = vec![1.0; n];
    let root = game.tree.root();
    let values = walker.walk(root, 0, &ones, &ones, rec);
    walker.holes(0, 0, player).iter().map(|&h| values[h as usize]).sum()
}
