//! Suit-isomorphism canonical form.
//!
//! Suits are relabelled by importance: more cards first, then the round-wise
//! rank content compared lexicographically (round 0 first, higher ranks first).
//! Two hands are isomorphic exactly when their canonical forms are equal.

use std::fmt;

use crate::cards::{cards_notation, Card};
use crate::config::GameConfig;

/// A hand (hole cards, then each round's community cards) after suit relabelling.
///
/// Equality, hashing and ordering look at the relabelled cards only, not at
/// the permutation that produced them.
#[derive(Clone, Debug)]
pub struct CanonicalHand {
    /// Per round, the canonical card-id mask.
    masks: Vec<u64>,
    num_suits: u8,
    /// `perm[original_suit] = canonical_suit`.
    perm: [u8; 4],
}

impl PartialEq for CanonicalHand {
    fn eq(&self, other: &Self) -> bool {
        self.masks == other.masks && self.num_suits == other.num_suits
    }
}

impl Eq for CanonicalHand {}

impl std::hash::Hash for CanonicalHand {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.masks.hash(state);
        self.num_suits.hash(state);
    }
}

impl PartialOrd for CanonicalHand {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalHand {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num_suits, &self.masks).cmp(&(other.num_suits, &other.masks))
    }
}

impl CanonicalHand {
    pub fn num_rounds(&self) -> usize {
        self.masks.len()
    }

    pub fn num_suits(&self) -> usize {
        self.num_suits as usize
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn permutation(&self) -> [u8; 4] {
        self.perm
    }

    /// Cards revealed in `round` (round 0 holds the hole cards), ascending.
    pub fn round_cards(&self, round: usize) -> Vec<Card> {
        cards_of_mask(self.masks[round], self.num_suits)
    }

    pub fn rounds(&self) -> Vec<Vec<Card>> {
        (0..self.masks.len()).map(|r| self.round_cards(r)).collect()
    }

    /// The same hand truncated to its first `rounds` rounds, re-canonicalized.
    pub fn prefix(&self, rounds: usize) -> CanonicalHand {
        canonicalize(&self.rounds()[..rounds], self.num_suits)
    }

    pub fn notation(&self, config: &GameConfig) -> String {
        self.rounds()
            .iter()
            .map(|cards| {
                let mut sorted = cards.clone();
                sorted.sort_by(|a, b| b.cmp(a));
                cards_notation(&sorted, config)
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for CanonicalHand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.masks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{m:x}")?;
        }
        Ok(())
    }
}

pub(crate) fn cards_of_mask(mask: u64, num_suits: u8) -> Vec<Card> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let id = m.trailing_zeros() as usize;
        out.push(Card::from_id(id, num_suits));
        m &= m - 1;
    }
    out
}

/// Relabels suits of `rounds` (hole cards first) into canonical order.
pub fn canonicalize(rounds: &[Vec<Card>], num_suits: u8) -> CanonicalHand {
    let masks: Vec<u64> = rounds
        .iter()
        .map(|cards| cards.iter().fold(0u64, |m, c| m | c.mask(num_suits)))
        .collect();
    canonicalize_masks(&masks, num_suits)
}

/// Same as [`canonicalize`] for per-round card-id masks.
pub fn canonicalize_masks(masks: &[u64], num_suits: u8) -> CanonicalHand {
    let ns = num_suits as usize;
    // rank content per suit per round
    let mut content = [[0u32; 8]; 4];
    let mut counts = [0u32; 4];
    assert!(masks.len() <= 8, "at most 8 rounds are supported");
    for (r, &mask) in masks.iter().enumerate() {
        let mut m = mask;
        while m != 0 {
            let id = m.trailing_zeros() as usize;
            let (rank, suit) = (id / ns, id % ns);
            content[suit][r] |= 1 << rank;
            counts[suit] += 1;
            m &= m - 1;
        }
    }
    let mut order: Vec<usize> = (0..ns).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .cmp(&counts[a])
            .then_with(|| content[b][..masks.len()].cmp(&content[a][..masks.len()]))
            .then(a.cmp(&b))
    });
    let mut perm = [0u8; 4];
    for (canon, &orig) in order.iter().enumerate() {
        perm[orig] = canon as u8;
    }
    let canon_masks = masks
        .iter()
        .map(|&mask| {
            let mut out = 0u64;
            let mut m = mask;
            while m != 0 {
                let id = m.trailing_zeros() as usize;
                let (rank, suit) = (id / ns, id % ns);
                out |= 1u64 << (rank * ns + perm[suit] as usize);
                m &= m - 1;
            }
            out
        })
        .collect();
    CanonicalHand {
        masks: canon_masks,
        num_suits,
        perm,
    }
}

/// All permutations of `0..n`.
pub fn suit_permutations(n: usize) -> Vec<Vec<u8>> {
    fn go(cur: &mut Vec<u8>, used: &mut [bool], n: usize, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for s in 0..n {
            if !used[s] {
                used[s] = true;
                cur.push(s as u8);
                go(cur, used, n, out);
                cur.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out
}

/// Applies `perm[suit]` to every card.
pub fn permute_suits(rounds: &[Vec<Card>], perm: &[u8]) -> Vec<Vec<Card>> {
    rounds
        .iter()
        .map(|cards| {
            cards
                .iter()
                .map(|c| Card::new(c.rank, perm[c.suit as usize]))
                .collect()
        })
        .collect()
}
