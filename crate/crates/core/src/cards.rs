use std::fmt;

use crate::config::GameConfig;
use crate::error::{Error, Result};

/// Suit characters in index order.
pub const SUIT_CHARS: [char; 4] = ['s', 'h', 'd', 'c'];

/// A card as a (rank, suit) pair of indices into the configured deck.
///
/// Ranks are ordered by strength: rank 0 is the weakest card.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Card {
    pub rank: u8,
    pub suit: u8,
}

impl Card {
    pub const fn new(rank: u8, suit: u8) -> Self {
        Card { rank, suit }
    }

    /// Dense index `rank * num_suits + suit`.
    #[inline]
    pub fn id(self, num_suits: u8) -> usize {
        self.rank as usize * num_suits as usize + self.suit as usize
    }

    #[inline]
    pub fn from_id(id: usize, num_suits: u8) -> Self {
        Card {
            rank: (id / num_suits as usize) as u8,
            suit: (id % num_suits as usize) as u8,
        }
    }

    #[inline]
    pub fn mask(self, num_suits: u8) -> u64 {
        1u64 << self.id(num_suits)
    }

    /// Text form such as `Ts` using the configured rank alphabet.
    pub fn notation(self, config: &GameConfig) -> String {
        let mut s = String::with_capacity(2);
        s.push(config.rank_char(self.rank));
        if config.num_suits > 1 {
            s.push(SUIT_CHARS[self.suit as usize]);
        }
        s
    }

    pub fn parse(text: &str, config: &GameConfig) -> Result<Card> {
        let mut chars = text.chars();
        let r = chars
            .next()
            .ok_or_else(|| Error::Parse("empty card".into()))?;
        let rank = config
            .rank_chars()
            .position(|c| c == r.to_ascii_uppercase())
            .ok_or_else(|| Error::Parse(format!("unknown rank in card {text:?}")))?;
        let suit = match chars.next() {
            None if config.num_suits == 1 => 0,
            None => return Err(Error::Parse(format!("card {text:?} lacks a suit"))),
            Some(s) => SUIT_CHARS
                .iter()
                .position(|&c| c == s.to_ascii_lowercase())
                .ok_or_else(|| Error::Parse(format!("unknown suit in card {text:?}")))?,
        };
        if chars.next().is_some() {
            return Err(Error::Parse(format!("trailing characters in card {text:?}")));
        }
        let card = Card::new(rank as u8, suit as u8);
        if card.rank >= config.num_ranks || card.suit >= config.num_suits {
            return Err(Error::Parse(format!("card {text:?} is not in this deck")));
        }
        Ok(card)
    }
}

/// Parses a run of cards written back to back, e.g. `AcTc9d`.
pub fn parse_cards(text: &str, config: &GameConfig) -> Result<Vec<Card>> {
    let width = if config.num_suits > 1 { 2 } else { 1 };
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.len() % width != 0 {
        return Err(Error::Parse(format!("cannot split {text:?} into cards")));
    }
    chars
        .chunks(width)
        .map(|c| Card::parse(&c.iter().collect::<String>(), config))
        .collect()
}

pub fn cards_notation(cards: &[Card], config: &GameConfig) -> String {
    cards.iter().map(|c| c.notation(config)).collect()
}

pub fn mask_of(cards: &[Card], num_suits: u8) -> u64 {
    cards.iter().fold(0, |m, c| m | c.mask(num_suits))
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.rank, SUIT_CHARS[self.suit as usize])
    }
}

/// All `k`-subsets of `items` in lexicographic index order.
pub fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GameConfig;

    #[test]
    fn combinations_count_matches_binomial() {
        let items: Vec<u8> = (0..7).collect();
        for k in 0..=7 {
            assert_eq!(combinations(&items, k).len() as u64, binomial(7, k as u64));
        }
        assert_eq!(combinations(&items, 0), vec![Vec::<u8>::new()]);
        assert!(combinations(&items, 8).is_empty());
    }

    #[test]
    fn notation_round_trips() {
        let cfg = GameConfig::numeral211();
        for text in ["As", "Th", "9d", "2c"] {
            let card = Card::parse(text, &cfg).unwrap();
            assert_eq!(card.notation(&cfg), text);
        }
        assert_eq!(Card::parse("Ts", &cfg).unwrap(), Card::new(8, 0));
        assert!(Card::parse("Ks", &cfg).is_err());
        assert!(Card::parse("Tx", &cfg).is_err());

        let kuhn = GameConfig::kuhn();
        assert_eq!(parse_cards("JK", &kuhn).unwrap(), vec![Card::new(0, 0), Card::new(2, 0)]);
    }
}
