//! Game parameters and the named presets.
//!
//! Configs can be written as `key = value` lines:
//!
//! ```text
//! name = numeral211
//! ranks = 10
//! suits = 4
//! hole_cards = 2
//! community = 1,1
//! ante = 5
//! bets = 10,20,20
//! max_raises = 4
//! blind_unit = 5
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::cards::binomial;
use crate::error::{Error, Result};

const DEFAULT_RANK_CHARS: &str = "23456789TA";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub name: String,
    pub num_ranks: u8,
    pub num_suits: u8,
    pub num_hole_cards: usize,
    /// Community cards dealt before each betting round after the first.
    pub community_per_round: Vec<usize>,
    pub ante: i64,
    pub bet_size_per_round: Vec<i64>,
    /// Bets and raises counted together, per round.
    pub max_raises_per_round: u8,
    /// Chips per "blind" when reporting milli-blinds per game.
    pub blind_unit: i64,
    /// Rank characters weakest first. Empty means the top `num_ranks` of `23456789TA`.
    pub rank_chars: String,
}

impl GameConfig {
    /// Kuhn poker: J < Q < K, one card each, ante 1, single bet of 1.
    pub fn kuhn() -> Self {
        GameConfig {
            name: "kuhn".into(),
            num_ranks: 3,
            num_suits: 1,
            num_hole_cards: 1,
            community_per_round: vec![],
            ante: 1,
            bet_size_per_round: vec![1],
            max_raises_per_round: 1,
            blind_unit: 1,
            rank_chars: "JQK".into(),
        }
    }

    /// Numeral211 Hold'em with two hole cards, one flop card and one turn card.
    pub fn numeral211() -> Self {
        GameConfig {
            name: "numeral211".into(),
            num_ranks: 10,
            num_suits: 4,
            num_hole_cards: 2,
            community_per_round: vec![1, 1],
            ante: 5,
            bet_size_per_round: vec![10, 20, 20],
            max_raises_per_round: 4,
            blind_unit: 5,
            rank_chars: String::new(),
        }
    }

    /// Numeral211 rules on a 20-card deck (ranks 7, 8, 9, T, A).
    pub fn numeral20() -> Self {
        GameConfig {
            name: "numeral20".into(),
            num_ranks: 5,
            ..Self::numeral211()
        }
    }

    /// Numeral211 rules with a single hole card per player.
    pub fn numeral211_one_hole() -> Self {
        GameConfig {
            name: "numeral211-1h".into(),
            num_hole_cards: 1,
            ..Self::numeral211()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "kuhn" => Ok(Self::kuhn()),
            "numeral211" => Ok(Self::numeral211()),
            "numeral20" | "numeral-20" => Ok(Self::numeral20()),
            "numeral211-1h" => Ok(Self::numeral211_one_hole()),
            other => Err(Error::Config(format!(
                "unknown preset {other:?} (known: kuhn, numeral211, numeral20, numeral211-1h)"
            ))),
        }
    }

    pub fn num_rounds(&self) -> usize {
        self.community_per_round.len() + 1
    }

    pub fn deck_size(&self) -> usize {
        self.num_ranks as usize * self.num_suits as usize
    }

    /// Community cards revealed once round `round` (0-based) starts.
    pub fn community_through(&self, round: usize) -> usize {
        self.community_per_round[..round].iter().sum()
    }

    /// Cards a player sees at round `round`.
    pub fn visible_cards(&self, round: usize) -> usize {
        self.num_hole_cards + self.community_through(round)
    }

    pub fn rank_chars(&self) -> impl Iterator<Item = char> + '_ {
        let all: &str = if self.rank_chars.is_empty() {
            &DEFAULT_RANK_CHARS[DEFAULT_RANK_CHARS.len() - self.num_ranks as usize..]
        } else {
            &self.rank_chars
        };
        all.chars()
    }

    pub fn rank_char(&self, rank: u8) -> char {
        self.rank_chars().nth(rank as usize).unwrap_or('?')
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.num_ranks == 0 || self.num_suits == 0 || self.num_hole_cards == 0 {
            return bad("ranks, suits and hole_cards must be at least 1".into());
        }
        if self.num_suits > 4 {
            return bad("at most 4 suits are supported".into());
        }
        let chars = if self.rank_chars.is_empty() {
            DEFAULT_RANK_CHARS.len()
        } else {
            self.rank_chars.chars().count()
        };
        if self.num_ranks as usize > chars {
            return bad(format!("{} ranks but only {chars} rank characters", self.num_ranks));
        }
        if self.deck_size() > 64 {
            return bad("decks above 64 cards are not supported".into());
        }
        if self.bet_size_per_round.len() != self.num_rounds() {
            return bad(format!(
                "{} bet sizes for {} rounds",
                self.bet_size_per_round.len(),
                self.num_rounds()
            ));
        }
        if self.bet_size_per_round.iter().any(|&b| b <= 0) {
            return bad("bet sizes must be positive".into());
        }
        if self.ante < 0 || self.blind_unit <= 0 || self.max_raises_per_round == 0 {
            return bad("ante must be non-negative, blind_unit and max_raises positive".into());
        }
        let dealt = 2 * self.num_hole_cards + self.community_through(self.num_rounds() - 1);
        if dealt > self.deck_size() {
            return bad(format!("{dealt} cards dealt from a {}-card deck", self.deck_size()));
        }
        Ok(())
    }

    /// Private views of one player at `round`: hole cards times the community
    /// cards dealt so far, with later rounds' cards ordered by round.
    pub fn hands_per_player(&self, round: usize) -> u64 {
        let mut remaining = self.deck_size() as u64;
        let mut count = binomial(remaining, self.num_hole_cards as u64);
        remaining -= self.num_hole_cards as u64;
        for &c in &self.community_per_round[..round] {
            count *= binomial(remaining, c as u64);
            remaining -= c as u64;
        }
        count
    }

    /// Complete deals (both players' hole cards and the full board).
    pub fn deal_count(&self) -> u64 {
        let h = self.num_hole_cards as u64;
        let n = self.deck_size() as u64;
        let mut count = binomial(n, h) * binomial(n - h, h);
        let mut remaining = n - 2 * h;
        for &c in &self.community_per_round {
            count *= binomial(remaining, c as u64);
            remaining -= c as u64;
        }
        count
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = GameConfig {
            name: "custom".into(),
            ..Self::numeral211()
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            let value = value.trim().trim_matches('"');
            let num = |v: &str| -> Result<i64> {
                v.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let list = |v: &str| -> Result<Vec<i64>> {
                if v.trim().is_empty() {
                    return Ok(vec![]);
                }
                v.split(',').map(num).collect()
            };
            let to_u8 = |v: i64| u8::try_from(v).map_err(|_| Error::Parse(format!("line {}: out of range", lineno + 1)));
            match key.trim() {
                "name" => cfg.name = value.to_string(),
                "preset" => {
                    let name = std::mem::take(&mut cfg.name);
                    cfg = Self::preset(value)?;
                    if name != "custom" {
                        cfg.name = name;
                    }
                }
                "ranks" => cfg.num_ranks = to_u8(num(value)?)?,
                "suits" => cfg.num_suits = to_u8(num(value)?)?,
                "hole_cards" => cfg.num_hole_cards = num(value)? as usize,
                "community" => {
                    cfg.community_per_round = list(value)?.into_iter().map(|c| c as usize).collect()
                }
                "ante" => cfg.ante = num(value)?,
                "bets" => cfg.bet_size_per_round = list(value)?,
                "max_raises" => cfg.max_raises_per_round = to_u8(num(value)?)?,
                "blind_unit" => cfg.blind_unit = num(value)?,
                "rank_chars" => cfg.rank_chars = value.to_string(),
                other => {
                    return Err(Error::Parse(format!("line {}: unknown key {other:?}", lineno + 1)))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Canonical `key = value` text; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let join = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "ranks = {}", self.num_ranks);
        let _ = writeln!(s, "suits = {}", self.num_suits);
        let _ = writeln!(s, "hole_cards = {}", self.num_hole_cards);
        let community: Vec<i64> = self.community_per_round.iter().map(|&c| c as i64).collect();
        let _ = writeln!(s, "community = \"{}\"", join(&community));
        let _ = writeln!(s, "ante = {}", self.ante);
        let _ = writeln!(s, "bets = \"{}\"", join(&self.bet_size_per_round));
        let _ = writeln!(s, "max_raises = {}", self.max_raises_per_round);
        let _ = writeln!(s, "blind_unit = {}", self.blind_unit);
        if !self.rank_chars.is_empty() {
            let _ = writeln!(s, "rank_chars = {}", self.rank_chars);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for cfg in [
            GameConfig::kuhn(),
            GameConfig::numeral211(),
            GameConfig::numeral20(),
            GameConfig::numeral211_one_hole(),
        ] {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn numeral211_hand_counts() {
        let cfg = GameConfig::numeral211();
        assert_eq!(cfg.hands_per_player(0), 780);
        assert_eq!(cfg.hands_per_player(1), 29_640);
        assert_eq!(cfg.hands_per_player(2), 1_096_680);
    }

    #[test]
    fn kuhn_deals() {
        assert_eq!(GameConfig::kuhn().deal_count(), 6);
        assert_eq!(GameConfig::kuhn().hands_per_player(0), 3);
    }

    #[test]
    fn text_round_trip() {
        for cfg in [GameConfig::kuhn(), GameConfig::numeral20()] {
            assert_eq!(GameConfig::parse(&cfg.to_text()).unwrap(), cfg);
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(GameConfig::parse("ranks = 10\nbets = 10,20").is_err());
        assert!(GameConfig::parse("colour = red").is_err());
        assert!(GameConfig::parse("ranks").is_err());
        assert!(GameConfig::parse("suits = 5").is_err());
        assert!(GameConfig::parse("bets = 10,0,20").is_err());
        let cfg = GameConfig::parse("preset = numeral20\nante = 2 # cheaper").unwrap();
        assert_eq!(cfg.num_ranks, 5);
        assert_eq!(cfg.ante, 2);
    }
}
