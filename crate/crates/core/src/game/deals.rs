//! Uniform chance model over complete deals.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cards::{binomial, Card};
use crate::config::GameConfig;

/// Both players' hole cards and the community cards of every later round.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deal {
    pub hole: [Vec<Card>; 2],
    pub board: Vec<Vec<Card>>,
}

/// Unranks the `rank`-th `k`-subset (lexicographic) of `items`.
fn unrank_combination<T: Copy>(items: &[T], k: usize, mut rank: u64) -> Vec<T> {
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    let n = items.len();
    for slot in 0..k {
        let left = k - slot - 1;
        let mut i = start;
        loop {
            let block = binomial((n - i - 1) as u64, left as u64);
            if rank < block {
                break;
            }
            rank -= block;
            i += 1;
        }
        out.push(items[i]);
        start = i + 1;
    }
    out
}

/// Uniform distribution over deals. Deals are indexed `0..count()` so the
/// enumeration can be split into disjoint ranges.
#[derive(Clone, Debug)]
pub struct ChanceModel {
    config: GameConfig,
    /// (cards taken, pool size before taking) per dealing step.
    steps: Vec<(usize, usize)>,
}

impl ChanceModel {
    pub fn new(config: &GameConfig) -> Self {
        let mut steps = Vec::new();
        let mut pool = config.deck_size();
        for _ in 0..2 {
            steps.push((config.num_hole_cards, pool));
            pool -= config.num_hole_cards;
        }
        for &c in &config.community_per_round {
            steps.push((c, pool));
            pool -= c;
        }
        ChanceModel {
            config: config.clone(),
            steps,
        }
    }

    pub fn count(&self) -> u64 {
        self.steps
            .iter()
            .map(|&(k, n)| binomial(n as u64, k as u64))
            .product()
    }

    pub fn probability(&self) -> f64 {
        1.0 / self.count() as f64
    }

    pub fn deal_at(&self, index: u64) -> Deal {
        let ns = self.config.num_suits;
        let mut pool: Vec<Card> = (0..self.config.deck_size())
            .map(|id| Card::from_id(id, ns))
            .collect();
        // mixed radix, last step fastest
        let radices: Vec<u64> = self
            .steps
            .iter()
            .map(|&(k, n)| binomial(n as u64, k as u64))
            .collect();
        let mut digits = vec![0u64; radices.len()];
        let mut rest = index;
        for i in (0..radices.len()).rev() {
            digits[i] = rest % radices[i];
            rest /= radices[i];
        }
        let mut parts = Vec::with_capacity(self.steps.len());
        for (i, &(k, _)) in self.steps.iter().enumerate() {
            let chosen = unrank_combination(&pool, k, digits[i]);
            pool.retain(|c| !chosen.contains(c));
            parts.push(chosen);
        }
        let mut parts = parts.into_iter();
        let hole = [parts.next().unwrap(), parts.next().unwrap()];
        Deal {
            hole,
            board: parts.collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Deal> + '_ {
        self.range(0, self.count())
    }

    pub fn range(&self, start: u64, end: u64) -> impl Iterator<Item = Deal> + '_ {
        (start..end).map(move |i| self.deal_at(i))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Deal {
        let ns = self.config.num_suits;
        let mut deck: Vec<Card> = (0..self.config.deck_size())
            .map(|id| Card::from_id(id, ns))
            .collect();
        deck.shuffle(rng);
        let mut it = deck.into_iter();
        let mut take = |k: usize| {
            let mut v: Vec<Card> = it.by_ref().take(k).collect();
            v.sort();
            v
        };
        let h = self.config.num_hole_cards;
        let hole = [take(h), take(h)];
        let board = self
            .config
            .community_per_round
            .iter()
            .map(|&k| take(k))
            .collect();
        Deal { hole, board }
    }
}

pub fn enumerate_deals(config: &GameConfig) -> impl Iterator<Item = Deal> {
    let model = ChanceModel::new(config);
    (0..model.count()).map(move |i| model.deal_at(i))
}

pub fn sample_deal(config: &GameConfig, seed: u64) -> Deal {
    ChanceModel::new(config).sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn closed_form(cfg: &GameConfig) -> u64 {
        let n = cfg.deck_size() as u64;
        let h = cfg.num_hole_cards as u64;
        let mut c = binomial(n, h) * binomial(n - h, h);
        let mut rest = n - 2 * h;
        for &k in &cfg.community_per_round {
            c *= binomial(rest, k as u64);
            rest -= k as u64;
        }
        c
    }

    #[test]
    fn enumeration_is_exhaustive_and_unique() {
        let tiny = GameConfig {
            name: "tiny".into(),
            num_ranks: 3,
            num_suits: 2,
            num_hole_cards: 1,
            community_per_round: vec![2],
            bet_size_per_round: vec![1, 2],
            ..GameConfig::numeral211()
        };
        for cfg in [GameConfig::kuhn(), tiny, GameConfig::numeral211_one_hole()] {
            let model = ChanceModel::new(&cfg);
            assert_eq!(model.count(), closed_form(&cfg));
            assert_eq!(model.count(), cfg.deal_count());
            if model.count() > 200_000 {
                continue;
            }
            let deals: HashSet<Deal> = model.iter().collect();
            assert_eq!(deals.len() as u64, model.count());
            for d in &deals {
                let mut all: Vec<Card> = d.hole.iter().chain(d.board.iter()).flatten().copied().collect();
                let len = all.len();
                all.sort();
                all.dedup();
                assert_eq!(all.len(), len);
            }
        }
        assert_eq!(ChanceModel::new(&GameConfig::kuhn()).count(), 6);
    }

    #[test]
    fn numeral211_counts() {
        let cfg = GameConfig::numeral211();
        assert_eq!(cfg.hands_per_player(0), 780);
        assert_eq!(ChanceModel::new(&cfg).count(), 780 * 703 * 36 * 35);
    }

    #[test]
    fn sampling_is_seeded() {
        let cfg = GameConfig::numeral20();
        assert_eq!(sample_deal(&cfg, 7), sample_deal(&cfg, 7));
        let distinct: HashSet<Deal> = (0..20).map(|s| sample_deal(&cfg, s)).collect();
        assert!(distinct.len() > 1);
    }
}
