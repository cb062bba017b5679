//! Tabular CFR over class rows, optionally merged into buckets.

use std::sync::Arc;

use super::table::{Layout, Mapped, Policy, RowMap, RowTable};
use super::traverse::{traverse, Chance, Recorder, Visit};
use crate::game::Game;

/// Positive-part normalization with a uniform fallback.
pub fn regret_matching(cumulative: &[f64], out: &mut [f64]) {
    let total: f64 = cumulative.iter().map(|r| r.max(0.0)).sum();
    if total > 0.0 {
        for (o, r) in out.iter_mut().zip(cumulative) {
            *o = r.max(0.0) / total;
        }
    } else {
        out.fill(1.0 / out.len() as f64);
    }
}

pub fn regret_matching_vec(cumulative: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cumulative.len()];
    regret_matching(cumulative, &mut out);
    out
}

/// Per-(node, class) sums of immediate regret and own reach gathered during a pass.
#[derive(Clone, Debug)]
pub struct ClassStats {
    pub regret: RowTable,
    /// Summed own reach, indexed by `layout.slot[node] + class`.
    pub reach: Vec<f64>,
}

impl ClassStats {
    pub fn new(layout: Arc<Layout>) -> Self {
        let slots = layout.slots;
        ClassStats {
            regret: RowTable::zeros(layout),
            reach: vec![0.0; slots],
        }
    }

    pub fn clear(&mut self) {
        self.regret.clear();
        self.reach.fill(0.0);
    }

    pub fn reach(&self, node: usize, class: usize) -> f64 {
        self.reach[self.regret.layout.slot[node] + class]
    }
}

impl Recorder for ClassStats {
    fn visit(&mut self, v: &Visit<'_>) {
        let layout = self.regret.layout.clone();
        let na = layout.actions[v.node];
        let base = layout.offset[v.node];
        let slot = layout.slot[v.node];
        for (k, &h) in v.holes.iter().enumerate() {
            let c = v.classes[h as usize] as usize;
            let row = &mut self.regret.data[base + c * na..base + (c + 1) * na];
            for a in 0..na {
                row[a] += v.weight * (v.action_values[k * na + a] - v.values[k]);
            }
            self.reach[slot + c] += v.weight * v.own_reach[h as usize];
        }
    }
}

/// Vanilla CFR when the row map is the identity, bucketed CFR otherwise.
#[derive(Clone, Debug)]
pub struct TabularCfr {
    game: Arc<Game>,
    map: RowMap,
    /// Running sums of immediate regret; divide by `iteration` for the time average.
    regret_sum: RowTable,
    /// Reach-weighted strategy numerators; row sums are the denominators.
    avg_num: RowTable,
    current: RowTable,
    stats: ClassStats,
    iteration: u64,
}

impl TabularCfr {
    pub fn new(game: Arc<Game>, map: RowMap) -> Self {
        let layout = Arc::new(Layout::new(&game, &map.rows));
        let classes = Arc::new(Layout::classes(&game));
        TabularCfr {
            map,
            regret_sum: RowTable::zeros(layout.clone()),
            avg_num: RowTable::zeros(layout.clone()),
            current: RowTable::uniform(layout),
            stats: ClassStats::new(classes),
            iteration: 0,
            game,
        }
    }

    pub fn vanilla(game: Arc<Game>) -> Self {
        let map = RowMap::identity(&game);
        TabularCfr::new(game, map)
    }

    pub fn game(&self) -> &Arc<Game> {
        &self.game
    }

    pub fn map(&self) -> &RowMap {
        &self.map
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// One iteration: a pass per player against σ^t, then regret matching.
    pub fn iterate(&mut self) {
        self.stats.clear();
        {
            let policy = Mapped {
                table: &self.current,
                map: &self.map,
            };
            for p in 0..2 {
                traverse(&self.game, &policy, p, false, Chance::Exact, &mut self.stats);
            }
        }
        self.absorb();
        self.iteration += 1;
        self.refresh();
    }

    fn absorb(&mut self) {
        let tree = &self.game.tree;
        let layout = self.stats.regret.layout.clone();
        for &d in &tree.decisions {
            let round = layout.round[d];
            let na = layout.actions[d];
            for c in 0..layout.rows[d] {
                let row = self.map.row(round, c as u32);
                let reach = self.stats.reach[layout.slot[d] + c];
                let sigma: Vec<f64> = self.current.row(d, row).to_vec();
                let regret = self.stats.regret.row(d, c);
                for (s, r) in self.regret_sum.row_mut(d, row).iter_mut().zip(regret) {
                    *s += r;
                }
                let num = self.avg_num.row_mut(d, row);
                for a in 0..na {
                    num[a] += reach * sigma[a];
                }
            }
        }
    }

    fn refresh(&mut self) {
        let layout = self.current.layout.clone();
        for &d in &self.game.tree.decisions {
            for row in 0..layout.rows[d] {
                let r = layout.range(d, row);
                regret_matching(&self.regret_sum.data[r.clone()], &mut self.current.data[r]);
            }
        }
    }

    /// σ^{t+1} per row.
    pub fn current(&self) -> &RowTable {
        &self.current
    }

    pub fn regret_sums(&self) -> &RowTable {
        &self.regret_sum
    }

    /// Time-averaged cumulative regret R^T of a row.
    pub fn cumulative_regret(&self, node: usize, row: usize) -> Vec<f64> {
        let t = self.iteration.max(1) as f64;
        self.regret_sum.row(node, row).iter().map(|r| r / t).collect()
    }

    /// Σ_I max_a R^T(I, a)_+ over every row.
    pub fn total_positive_regret(&self) -> f64 {
        let layout = &self.regret_sum.layout;
        let t = self.iteration.max(1) as f64;
        let mut total = 0.0;
        for &d in &self.game.tree.decisions {
            for row in 0..layout.rows[d] {
                let m = self.regret_sum.row(d, row).iter().copied().fold(0.0, f64::max);
                total += m / t;
            }
        }
        total
    }

    pub fn average_numerators(&self) -> &RowTable {
        &self.avg_num
    }

    /// Normalized average strategy per row; uniform where no reach was recorded.
    pub fn average(&self) -> RowTable {
        let mut out = self.avg_num.clone();
        let layout = out.layout.clone();
        for &d in &self.game.tree.decisions {
            for row in 0..layout.rows[d] {
                normalize_or_uniform(out.row_mut(d, row));
            }
        }
        out
    }

    /// The average strategy expanded to one row per class.
    pub fn average_classes(&self) -> RowTable {
        expand(&self.game, &self.average(), &self.map)
    }

    pub fn current_classes(&self) -> RowTable {
        expand(&self.game, &self.current, &self.map)
    }

    pub fn set_state(&mut self, regret_sum: RowTable, avg_num: RowTable, iteration: u64) {
        self.regret_sum = regret_sum;
        self.avg_num = avg_num;
        self.iteration = iteration;
        self.refresh();
    }
}

pub fn normalize_or_uniform(row: &mut [f64]) {
    let total: f64 = row.iter().sum();
    if total > 0.0 {
        row.iter_mut().for_each(|x| *x /= total);
    } else {
        let u = 1.0 / row.len() as f64;
        row.fill(u);
    }
}

/// Expands a row table through `map` into one row per class.
pub fn expand(game: &Game, table: &RowTable, map: &RowMap) -> RowTable {
    let layout = Arc::new(Layout::classes(game));
    let mut out = RowTable::zeros(layout.clone());
    let mapped = Mapped { table, map };
    for &d in &game.tree.decisions {
        for c in 0..layout.rows[d] {
            out.row_mut(d, c).copy_from_slice(mapped.strategy(d, c as u32));
        }
    }
    out
}
