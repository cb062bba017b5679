//! Expected-hand-strength bucketing and CFR over the buckets.

pub mod kmeans;

use std::io::{BufRead, Write};
use std::sync::Arc;

pub use kmeans::{kmeans, ClusterConfig, Clustering};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::hand_strength::StrengthTable;
use crate::solver::{RowMap, TabularCfr};

/// `w + d/2` from the class's own-round outcome row.
pub fn ehs_scalar(strength: &StrengthTable, round: usize, class: u32) -> f64 {
    let [_, d, w] = strength.class_row(round, class);
    w + d / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FeatureMode {
    /// The scalar EHS of the hand's round.
    #[default]
    Ehs,
    /// Every row of the strength tensor, flattened.
    Tensor,
}

pub fn features(game: &Game, strength: &StrengthTable, round: usize, mode: FeatureMode) -> Vec<Vec<f64>> {
    (0..game.hands.num_classes(round) as u32)
        .map(|c| match mode {
            FeatureMode::Ehs => vec![ehs_scalar(strength, round, c)],
            FeatureMode::Tensor => strength.tensor(&game.hands, round, c).flat(),
        })
        .collect()
}

/// Bucket of every class in each abstracted round.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketMap {
    pub per_round: Vec<Option<Vec<u32>>>,
    /// Bucket count per round (the class count where a round is not abstracted).
    pub buckets: Vec<usize>,
}

impl BucketMap {
    /// Every class its own bucket.
    pub fn identity(game: &Game) -> Self {
        let rounds = game.num_rounds();
        BucketMap {
            per_round: vec![None; rounds],
            buckets: (0..rounds).map(|r| game.hands.num_classes(r)).collect(),
        }
    }

    /// Clusters each round with a budget; `budgets[r] = None` keeps round `r` lossless.
    /// Points are weighted by how many concrete hands each class stands for.
    pub fn cluster(
        game: &Game,
        strength: &StrengthTable,
        budgets: &[Option<usize>],
        mode: FeatureMode,
        config: &ClusterConfig,
    ) -> Result<Self> {
        let mut map = BucketMap::identity(game);
        for (round, budget) in budgets.iter().enumerate().take(game.num_rounds()) {
            let Some(k) = *budget else { continue };
            let pts = features(game, strength, round, mode);
            let weights: Vec<f64> = game.hands.multiplicity[round].iter().map(|&m| m as f64).collect();
            let cfg = ClusterConfig {
                k,
                seed: config.seed.wrapping_add(round as u64),
                ..config.clone()
            };
            let c = kmeans(&pts, Some(&weights), &cfg)?;
            map.per_round[round] = Some(c.assignment);
            map.buckets[round] = k;
        }
        Ok(map)
    }

    pub fn bucket(&self, round: usize, class: u32) -> u32 {
        match &self.per_round[round] {
            Some(m) => m[class as usize],
            None => class,
        }
    }

    pub fn to_row_map(&self) -> RowMap {
        RowMap {
            per_round: self.per_round.clone(),
            rows: self.buckets.clone(),
        }
    }

    /// CSV `round,canonical_hand_id,bucket` for the abstracted rounds; rounds are 1-based.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "round,canonical_hand_id,bucket")?;
        for (r, m) in self.per_round.iter().enumerate() {
            if let Some(m) = m {
                for (c, b) in m.iter().enumerate() {
                    writeln!(out, "{},{c},{b}", r + 1)?;
                }
            }
        }
        Ok(())
    }

    /// Reads a map written by [`BucketMap::write_csv`] or by another tool.
    /// Every class of a listed round must appear exactly once.
    pub fn read_csv<R: BufRead>(game: &Game, input: R) -> Result<Self> {
        let rounds = game.num_rounds();
        let mut rows: Vec<Option<Vec<Option<u32>>>> = vec![None; rounds];
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("round")) {
                continue;
            }
            let bad = || Error::Parse(format!("bucket map line {}: {line:?}", i + 1));
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(bad());
            }
            let round: usize = f[0].parse().map_err(|_| bad())?;
            let class: usize = f[1].parse().map_err(|_| bad())?;
            let bucket: u32 = f[2].parse().map_err(|_| bad())?;
            if round == 0 || round > rounds || class >= game.hands.num_classes(round - 1) {
                return Err(bad());
            }
            let slot = rows[round - 1].get_or_insert_with(|| vec![None; game.hands.num_classes(round - 1)]);
            if slot[class].replace(bucket).is_some() {
                return Err(Error::Parse(format!("class {class} of round {round} listed twice")));
            }
        }
        let mut map = BucketMap::identity(game);
        for (r, row) in rows.into_iter().enumerate() {
            let Some(row) = row else { continue };
            let Some(full) = row.into_iter().collect::<Option<Vec<u32>>>() else {
                return Err(Error::Parse(format!("round {} is missing classes", r + 1)));
            };
            map.buckets[r] = full.iter().max().map_or(0, |b| *b as usize + 1);
            map.per_round[r] = Some(full);
        }
        Ok(map)
    }
}

/// Vanilla CFR with one table row per bucket.
pub fn bucketed_cfr(game: Arc<Game>, map: &BucketMap) -> TabularCfr {
    TabularCfr::new(game, map.to_row_map())
}
