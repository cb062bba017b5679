//! Showdown hand ranking.
//!
//! Hands are the best `min(3, visible)` cards. Three-card categories from
//! strongest to weakest: straight flush, three of a kind, straight, flush,
//! pair, high card. Ace ranks directly above ten and does not play low.

use std::cmp::Ordering;

use crate::cards::{combinations, Card};
use crate::config::GameConfig;
use crate::error::{contract, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    HighCard,
    Pair,
    Flush,
    Straight,
    ThreeOfAKind,
    StraightFlush,
}

/// Category plus tiebreak ranks (highest first). Derived `Ord` is the strength order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HandRank {
    pub category: Category,
    pub tiebreak: [u8; 3],
}

/// Outcome of a comparison from the first hand's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Lose,
    Draw,
    Win,
}

impl HandRank {
    /// Packs into an integer with the same ordering.
    pub fn packed(self) -> u32 {
        (self.category as u32) << 24
            | (self.tiebreak[0] as u32) << 16
            | (self.tiebreak[1] as u32) << 8
            | self.tiebreak[2] as u32
    }
}

pub fn compare(a: HandRank, b: HandRank) -> Outcome {
    match a.cmp(&b) {
        Ordering::Less => Outcome::Lose,
        Ordering::Equal => Outcome::Draw,
        Ordering::Greater => Outcome::Win,
    }
}

/// Number of cards that make a hand at showdown.
pub fn hand_size(config: &GameConfig) -> usize {
    config.visible_cards(config.num_rounds() - 1).min(3)
}

/// Ranks exactly `cards` (1 to 3 cards) as a made hand.
pub fn rank_exact(cards: &[Card]) -> HandRank {
    let mut ranks: Vec<u8> = cards.iter().map(|c| c.rank).collect();
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    let mut tiebreak = [0u8; 3];
    match ranks.len() {
        1 => {
            tiebreak[0] = ranks[0];
            HandRank { category: Category::HighCard, tiebreak }
        }
        2 => {
            tiebreak[..2].copy_from_slice(&ranks);
            let category = if ranks[0] == ranks[1] {
                Category::Pair
            } else {
                Category::HighCard
            };
            HandRank { category, tiebreak }
        }
        3 => {
            let flush = cards.iter().all(|c| c.suit == cards[0].suit);
            let straight = ranks[0] == ranks[1] + 1 && ranks[1] == ranks[2] + 1;
            if ranks[0] == ranks[2] {
                tiebreak[0] = ranks[0];
                return HandRank { category: Category::ThreeOfAKind, tiebreak };
            }
            if straight {
                tiebreak[0] = ranks[0];
                let category = if flush {
                    Category::StraightFlush
                } else {
                    Category::Straight
                };
                return HandRank { category, tiebreak };
            }
            if ranks[0] == ranks[1] || ranks[1] == ranks[2] {
                let (pair, kicker) = if ranks[0] == ranks[1] {
                    (ranks[0], ranks[2])
                } else {
                    (ranks[1], ranks[0])
                };
                tiebreak[0] = pair;
                tiebreak[1] = kicker;
                return HandRank { category: Category::Pair, tiebreak };
            }
            tiebreak.copy_from_slice(&ranks);
            let category = if flush {
                Category::Flush
            } else {
                Category::HighCard
            };
            HandRank { category, tiebreak }
        }
        n => panic!("rank_exact called with {n} cards"),
    }
}

/// Best hand of `hand_size(config)` cards drawn from `cards`.
pub fn rank_hand(cards: &[Card], config: &GameConfig) -> Result<HandRank> {
    let k = hand_size(config);
    if cards.len() < k {
        return contract(format!("need {k} cards to make a hand, got {}", cards.len()));
    }
    Ok(best_of(cards, k))
}

pub(crate) fn best_of(cards: &[Card], k: usize) -> HandRank {
    if cards.len() == k {
        return rank_exact(cards);
    }
    combinations(cards, k)
        .iter()
        .map(|c| rank_exact(c))
        .max()
        .expect("at least one subset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::parse_cards;
    use proptest::prelude::*;

    fn rank(text: &str) -> HandRank {
        let cfg = GameConfig::numeral211();
        rank_hand(&parse_cards(text, &cfg).unwrap(), &cfg).unwrap()
    }

    #[test]
    fn table_examples() {
        assert_eq!(rank("Ts9s8s").category, Category::StraightFlush);
        assert_eq!(rank("TsThTc").category, Category::ThreeOfAKind);
        assert_eq!(rank("Ts9h8c").category, Category::Straight);
        assert_eq!(rank("Ts8s6s").category, Category::Flush);
        let pair = rank("TsTh8c");
        assert_eq!(pair.category, Category::Pair);
        assert_eq!(&pair.tiebreak[..2], &[8, 6]);
        assert_eq!(rank("Ts8h6c").category, Category::HighCard);
        // Ace sits right above ten.
        assert_eq!(rank("AsTh9c").category, Category::Straight);
        assert_eq!(rank("As2h3c").category, Category::HighCard);
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(rank("Ts9s8s"), rank("TsThTc")), Outcome::Win);
        assert_eq!(compare(rank("Ts9h8c"), rank("Td9s8h")), Outcome::Draw);
        assert_eq!(compare(rank("TsTh9c"), rank("TdTc8h")), Outcome::Win);
        assert_eq!(compare(rank("TdTc8h"), rank("TsTh9c")), Outcome::Lose);
    }

    #[test]
    fn best_of_four_is_max_over_subsets() {
        let cfg = GameConfig::numeral211();
        let cards = parse_cards("AsTs9h9s", &cfg).unwrap();
        let brute = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .iter()
            .map(|ix| rank_exact(&ix.map(|i| cards[i])))
            .max()
            .unwrap();
        let best = rank_hand(&cards, &cfg).unwrap();
        assert_eq!(best, brute);
        assert_eq!(best.category, Category::StraightFlush);
    }

    #[test]
    fn too_few_cards_is_rejected() {
        let cfg = GameConfig::numeral211();
        assert!(rank_hand(&parse_cards("AsTs", &cfg).unwrap(), &cfg).is_err());
    }

    #[test]
    fn kuhn_is_single_card() {
        let cfg = GameConfig::kuhn();
        assert_eq!(hand_size(&cfg), 1);
        let k = rank_hand(&parse_cards("K", &cfg).unwrap(), &cfg).unwrap();
        let q = rank_hand(&parse_cards("Q", &cfg).unwrap(), &cfg).unwrap();
        assert_eq!(compare(k, q), Outcome::Win);
    }

    fn arb_hand() -> impl Strategy<Value = Vec<Card>> {
        proptest::sample::subsequence((0..40usize).collect::<Vec<_>>(), 3)
            .prop_map(|ids| ids.into_iter().map(|i| Card::from_id(i, 4)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn order_is_total_and_consistent(a in arb_hand(), b in arb_hand(), c in arb_hand()) {
            let (ra, rb, rc) = (rank_exact(&a), rank_exact(&b), rank_exact(&c));
            prop_assert_eq!(ra.cmp(&rb), rb.cmp(&ra).reverse());
            prop_assert_eq!(ra.cmp(&rb), ra.packed().cmp(&rb.packed()));
            if ra <= rb && rb <= rc {
                prop_assert!(ra <= rc);
            }
            let flipped = match compare(rb, ra) {
                Outcome::Win => Outcome::Lose,
                Outcome::Lose => Outcome::Win,
                Outcome::Draw => Outcome::Draw,
            };
            prop_assert_eq!(compare(ra, rb), flipped);
        }
    }
}
