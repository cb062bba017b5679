//! Card tables: hole-card combinations, boards per round, isomorphism
//! classes and showdown ranks.

use std::collections::HashMap;

use crate::cards::{binomial, combinations, Card};
use crate::config::GameConfig;
use crate::hand_strength::canonical::{canonicalize_masks, suit_permutations, CanonicalHand};
use crate::hand_strength::rank::{best_of, hand_size};

pub const BLOCKED: u32 = u32::MAX;

/// Community cards through some round, with links to the neighbouring rounds.
#[derive(Clone, Debug)]
pub struct Board {
    /// Card mask of each dealt community round (rounds 1..=r).
    pub round_masks: Vec<u64>,
    pub mask: u64,
    /// Index of the previous-round board (0 for round 0).
    pub parent: usize,
    pub children: Vec<usize>,
    /// Hole combinations that avoid this board.
    pub valid: Vec<u32>,
    /// Class id per hole combination, `BLOCKED` when it overlaps the board.
    pub class_of: Vec<u32>,
    /// Children grouped into suit orbits under this board's stabilizer:
    /// (representative child, permutations mapping it onto each orbit member).
    pub orbits: Vec<(usize, Vec<u16>)>,
}

#[derive(Clone, Debug)]
pub struct HandSpace {
    pub num_suits: u8,
    pub holes: Vec<Vec<Card>>,
    pub hole_masks: Vec<u64>,
    /// Hole ids containing each card id.
    pub holes_with_card: Vec<Vec<u32>>,
    /// `boards[round][i]`.
    pub boards: Vec<Vec<Board>>,
    /// Sorted class representatives per round.
    classes: Vec<Vec<CanonicalHand>>,
    class_index: Vec<HashMap<CanonicalHand, u32>>,
    /// Raw (board, hole) pairs per class.
    pub multiplicity: Vec<Vec<u32>>,
    /// Packed showdown rank per final board per hole (0 when blocked).
    pub final_rank: Vec<Vec<u32>>,
    /// Valid holes of each final board sorted by ascending rank.
    pub final_order: Vec<Vec<u32>>,
    /// Ordered (hole, hole, board) tuples reaching each round.
    pub tuples: Vec<f64>,
    /// Suit permutations, and the image of every hole id under each.
    pub perms: Vec<Vec<u8>>,
    pub hole_perm: Vec<Vec<u32>>,
}

impl HandSpace {
    pub fn build(config: &GameConfig) -> Self {
        let ns = config.num_suits;
        let deck: Vec<Card> = (0..config.deck_size()).map(|i| Card::from_id(i, ns)).collect();
        let holes = combinations(&deck, config.num_hole_cards);
        let hole_masks: Vec<u64> = holes
            .iter()
            .map(|h| h.iter().fold(0, |m, c| m | c.mask(ns)))
            .collect();
        let mut holes_with_card = vec![Vec::new(); deck.len()];
        for (i, &m) in hole_masks.iter().enumerate() {
            for (c, list) in holes_with_card.iter_mut().enumerate() {
                if m >> c & 1 == 1 {
                    list.push(i as u32);
                }
            }
        }

        let rounds = config.num_rounds();
        let mut boards: Vec<Vec<Board>> = Vec::with_capacity(rounds);
        boards.push(vec![Board {
            round_masks: vec![],
            mask: 0,
            parent: 0,
            children: vec![],
            valid: vec![],
            class_of: vec![],
            orbits: vec![],
        }]);
        for r in 1..rounds {
            let k = config.community_per_round[r - 1];
            let mut next = Vec::new();
            for (pi, parent) in boards[r - 1].iter_mut().enumerate() {
                let free: Vec<Card> = deck
                    .iter()
                    .copied()
                    .filter(|c| parent.mask & c.mask(ns) == 0)
                    .collect();
                for combo in combinations(&free, k) {
                    let m = combo.iter().fold(0, |m, c| m | c.mask(ns));
                    let mut round_masks = parent.round_masks.clone();
                    round_masks.push(m);
                    parent.children.push(next.len());
                    next.push(Board {
                        round_masks,
                        mask: parent.mask | m,
                        parent: pi,
                        children: vec![],
                        valid: vec![],
                        class_of: vec![],
                        orbits: vec![],
                    });
                }
            }
            boards.push(next);
        }

        let mut classes = Vec::with_capacity(rounds);
        let mut class_index = Vec::with_capacity(rounds);
        let mut multiplicity = Vec::with_capacity(rounds);
        let mut tuples = Vec::with_capacity(rounds);
        let h = config.num_hole_cards as u64;
        for round_boards in boards.iter_mut() {
            let mut index: HashMap<CanonicalHand, u32> = HashMap::new();
            let mut raw: Vec<Vec<CanonicalHand>> = Vec::with_capacity(round_boards.len());
            let mut masks = Vec::new();
            for b in round_boards.iter_mut() {
                b.valid = (0..holes.len() as u32)
                    .filter(|&i| hole_masks[i as usize] & b.mask == 0)
                    .collect();
                let mut per_board = Vec::with_capacity(b.valid.len());
                for &hi in &b.valid {
                    masks.clear();
                    masks.push(hole_masks[hi as usize]);
                    masks.extend_from_slice(&b.round_masks);
                    let canon = canonicalize_masks(&masks, ns);
                    if !index.contains_key(&canon) {
                        index.insert(canon.clone(), 0);
                    }
                    per_board.push(canon);
                }
                raw.push(per_board);
            }
            let mut sorted: Vec<CanonicalHand> = index.keys().cloned().collect();
            sorted.sort();
            for (i, c) in sorted.iter().enumerate() {
                index.insert(c.clone(), i as u32);
            }
            let mut mult = vec![0u32; sorted.len()];
            for (b, per_board) in round_boards.iter_mut().zip(raw) {
                b.class_of = vec![BLOCKED; holes.len()];
                for (&hi, canon) in b.valid.iter().zip(per_board) {
                    let id = index[&canon];
                    b.class_of[hi as usize] = id;
                    mult[id as usize] += 1;
                }
            }
            let n_board = deck.len() as u64 - round_boards[0].mask.count_ones() as u64;
            let count = round_boards.len() as u64 * binomial(n_board, h) * binomial(n_board - h, h);
            tuples.push(count as f64);
            classes.push(sorted);
            class_index.push(index);
            multiplicity.push(mult);
        }

        let k = hand_size(config);
        let last = &boards[rounds - 1];
        let mut final_rank = Vec::with_capacity(last.len());
        let mut final_order = Vec::with_capacity(last.len());
        let mut cards = Vec::new();
        for b in last {
            let board_cards: Vec<Card> = deck
                .iter()
                .copied()
                .filter(|c| b.mask & c.mask(ns) != 0)
                .collect();
            let mut ranks = vec![0u32; holes.len()];
            for &hi in &b.valid {
                cards.clear();
                cards.extend_from_slice(&holes[hi as usize]);
                cards.extend_from_slice(&board_cards);
                ranks[hi as usize] = best_of(&cards, k).packed();
            }
            let mut order = b.valid.clone();
            order.sort_by_key(|&hi| (ranks[hi as usize], hi));
            final_rank.push(ranks);
            final_order.push(order);
        }

        let perms = suit_permutations(ns as usize);
        let card_perm: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| {
                deck.iter()
                    .map(|c| Card::new(c.rank, p[c.suit as usize]).id(ns))
                    .collect()
            })
            .collect();
        let permute = |pi: usize, m: u64| {
            let mut out = 0u64;
            let mut rest = m;
            while rest != 0 {
                out |= 1u64 << card_perm[pi][rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            out
        };
        let hole_of: HashMap<u64, u32> = hole_masks.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        let hole_perm: Vec<Vec<u32>> = (0..perms.len())
            .map(|pi| hole_masks.iter().map(|&m| hole_of[&permute(pi, m)]).collect())
            .collect();
        for r in 0..rounds - 1 {
            let (head, tail) = boards.split_at_mut(r + 1);
            let (level, next) = (&mut head[r], &tail[0]);
            for b in level.iter_mut() {
                let stab: Vec<usize> = (0..perms.len())
                    .filter(|&pi| b.round_masks.iter().all(|&m| permute(pi, m) == m))
                    .collect();
                let by_mask: HashMap<u64, usize> = b
                    .children
                    .iter()
                    .map(|&c| (next[c].round_masks[r], c))
                    .collect();
                let mut seen = HashMap::new();
                for &c in &b.children {
                    if seen.contains_key(&c) {
                        continue;
                    }
                    let mut members = Vec::new();
                    for &pi in &stab {
                        let image = by_mask[&permute(pi, next[c].round_masks[r])];
                        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(image) {
                            e.insert(c);
                            members.push(pi as u16);
                        }
                    }
                    b.orbits.push((c, members));
                }
            }
        }

        HandSpace {
            num_suits: ns,
            holes,
            hole_masks,
            holes_with_card,
            boards,
            classes,
            class_index,
            multiplicity,
            final_rank,
            final_order,
            tuples,
            perms,
            hole_perm,
        }
    }

    pub fn num_holes(&self) -> usize {
        self.holes.len()
    }

    pub fn num_classes(&self, round: usize) -> usize {
        self.classes[round].len()
    }

    pub fn class_hand(&self, round: usize, class: u32) -> &CanonicalHand {
        &self.classes[round][class as usize]
    }

    pub fn class_hands(&self, round: usize) -> &[CanonicalHand] {
        &self.classes[round]
    }

    pub fn class_of_hand(&self, round: usize, hand: &CanonicalHand) -> Option<u32> {
        self.class_index.get(round)?.get(hand).copied()
    }

    /// Class of a concrete hole combination on a concrete board.
    pub fn class_of(&self, round: usize, board: usize, hole: u32) -> u32 {
        self.boards[round][board].class_of[hole as usize]
    }

    pub fn hole_id(&self, cards: &[Card]) -> Option<u32> {
        let m = cards.iter().fold(0, |m, c| m | c.mask(self.num_suits));
        self.hole_masks.iter().position(|&h| h == m).map(|i| i as u32)
    }

    /// Index of the board whose per-round community cards are `rounds`.
    pub fn board_id(&self, rounds: &[Vec<Card>]) -> Option<usize> {
        let mut b = 0usize;
        for (r, cards) in rounds.iter().enumerate() {
            let m = cards.iter().fold(0, |m, c| m | c.mask(self.num_suits));
            b = *self.boards[r]
                .get(b)?
                .children
                .iter()
                .find(|&&c| self.boards[r + 1][c].round_masks[r] == m)?;
        }
        Some(b)
    }

    /// Board index of the round-`round` ancestor of final-round-or-earlier board `board` at `from`.
    pub fn ancestor(&self, from: usize, board: usize, round: usize) -> usize {
        let mut b = board;
        for r in (round + 1..=from).rev() {
            b = self.boards[r][b].parent;
        }
        b
    }
}

impl HandSpace {
    fn hole_size(&self) -> u32 {
        self.hole_masks.first().map_or(0, |m| m.count_ones())
    }

    /// For each valid hole of `board` at `round`, the total weight of opponent
    /// holes that share no card with it. `weights` must be zero on holes
    /// blocked by the board.
    pub fn compatible_sums(&self, round: usize, board: usize, weights: &[f64], out: &mut [f64]) {
        let b = &self.boards[round][board];
        match self.hole_size() {
            1 | 2 => {
                let total: f64 = b.valid.iter().map(|&h| weights[h as usize]).sum();
                let mut card_sum = [0.0f64; 64];
                for &h in &b.valid {
                    let w = weights[h as usize];
                    let mut m = self.hole_masks[h as usize];
                    while m != 0 {
                        card_sum[m.trailing_zeros() as usize] += w;
                        m &= m - 1;
                    }
                }
                let pair = self.hole_size() == 2;
                for &h in &b.valid {
                    let mut v = total;
                    let mut m = self.hole_masks[h as usize];
                    while m != 0 {
                        v -= card_sum[m.trailing_zeros() as usize];
                        m &= m - 1;
                    }
                    if pair {
                        v += weights[h as usize];
                    }
                    out[h as usize] = v;
                }
            }
            _ => {
                for &h in &b.valid {
                    let mh = self.hole_masks[h as usize];
                    out[h as usize] = b
                        .valid
                        .iter()
                        .filter(|&&o| self.hole_masks[o as usize] & mh == 0)
                        .map(|&o| weights[o as usize])
                        .sum();
                }
            }
        }
    }

    /// For each valid hole of final board `board`: compatible opponent weight
    /// holding a weaker, equal and stronger hand, as `[weaker, equal, stronger]`.
    pub fn showdown_sums(&self, board: usize, weights: &[f64], out: &mut [[f64; 3]]) {
        let last = self.boards.len() - 1;
        let ranks = &self.final_rank[board];
        let order = &self.final_order[board];
        let size = self.hole_size();
        if size > 2 {
            let valid = &self.boards[last][board].valid;
            for &h in valid {
                let mh = self.hole_masks[h as usize];
                let mut acc = [0.0; 3];
                for &o in valid {
                    if self.hole_masks[o as usize] & mh != 0 {
                        continue;
                    }
                    let slot = match ranks[o as usize].cmp(&ranks[h as usize]) {
                        std::cmp::Ordering::Less => 0,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Greater => 2,
                    };
                    acc[slot] += weights[o as usize];
                }
                out[h as usize] = acc;
            }
            return;
        }
        let pair = size == 2;
        let card_term = |sums: &[f64; 64], h: u32| {
            let mut v = 0.0;
            let mut m = self.hole_masks[h as usize];
            while m != 0 {
                v += sums[m.trailing_zeros() as usize];
                m &= m - 1;
            }
            v
        };
        let add_cards = |sums: &mut [f64; 64], h: u32, w: f64| {
            let mut m = self.hole_masks[h as usize];
            while m != 0 {
                sums[m.trailing_zeros() as usize] += w;
                m &= m - 1;
            }
        };
        let mut total = 0.0;
        let mut total_card = [0.0f64; 64];
        for &h in order {
            total += weights[h as usize];
            add_cards(&mut total_card, h, weights[h as usize]);
        }
        let mut below = 0.0;
        let mut below_card = [0.0f64; 64];
        let mut group_card = [0.0f64; 64];
        let mut start = 0;
        while start < order.len() {
            let rank = ranks[order[start] as usize];
            let mut end = start;
            let mut group = 0.0;
            while end < order.len() && ranks[order[end] as usize] == rank {
                let h = order[end];
                group += weights[h as usize];
                add_cards(&mut group_card, h, weights[h as usize]);
                end += 1;
            }
            for &h in &order[start..end] {
                let own = if pair { weights[h as usize] } else { 0.0 };
                let weaker = below - card_term(&below_card, h);
                let equal = group - card_term(&group_card, h) + own;
                let compat = total - card_term(&total_card, h) + own;
                out[h as usize] = [weaker, equal, compat - weaker - equal];
            }
            below += group;
            for &h in &order[start..end] {
                let w = weights[h as usize];
                add_cards(&mut below_card, h, w);
                let mut m = self.hole_masks[h as usize];
                while m != 0 {
                    group_card[m.trailing_zeros() as usize] = 0.0;
                    m &= m - 1;
                }
            }
            start = end;
        }
    }
}
