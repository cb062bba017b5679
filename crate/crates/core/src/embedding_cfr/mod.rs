//! CFR with advisor-space regrets.
//!
//! Each abstracted round keeps, per decision node (info-block), `m × |A|`
//! matrices of embedded regret, current strategy and average strategy. A
//! class reads its strategy as `Φ_{·,q}ᵀ σ(E, ·)` and pushes its immediate
//! regret back through the same coordinates. All blocks of a round are stored
//! side by side so that both directions are a single matrix product.

pub mod checkpoint;
pub mod ops;
pub mod provider;
pub mod scenario;

use std::ops::Range;
use std::sync::Arc;

use ndarray::{s, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use ops::{
    accumulate_average, accumulate_sampled_regret, advisor_regret_matching, project, query_strategy,
    recover_average_strategy,
};
pub use provider::EmbeddingProvider;
pub use scenario::{Regime, RegretDecreaseReport, SingleAdvisorScenario};

use crate::error::{contract, Error, Result};
use crate::game::{Game, InfoBlockKey};
use crate::solver::{
    normalize_or_uniform, regret_matching, traverse, Chance, ClassStats, DealSample, Layout, Policy, RowTable,
};

/// How chance is handled each iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Every deal, weighted by its probability.
    Exact,
    /// `budget` deals drawn with replacement, reseeded per iteration from `seed`.
    Deals { budget: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingConfig {
    /// First round read through the provider; earlier rounds are tabular.
    pub abstract_from: usize,
    pub sampling: Sampling,
    /// Accumulate the advisor average weighted by `Φᵀπ` instead of the plain running mean.
    pub weighted_average: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            abstract_from: 1,
            sampling: Sampling::Exact,
            weighted_average: false,
        }
    }
}

/// All blocks of one round, concatenated along the action axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvisorRound {
    pub round: usize,
    pub nodes: Vec<usize>,
    pub cols: Vec<Range<usize>>,
    /// `m × Σ|A|`.
    pub regret: Array2<f64>,
    pub strategy: Array2<f64>,
    /// Running mean of `σ`, or reach-weighted numerators in weighted mode.
    pub average: Array2<f64>,
}

impl AdvisorRound {
    fn new(game: &Game, round: usize, m: usize) -> Self {
        let mut nodes = Vec::new();
        let mut cols = Vec::new();
        let mut width = 0;
        for &d in &game.tree.decisions {
            if game.tree.nodes[d].round == round {
                let a = game.tree.num_actions(d);
                nodes.push(d);
                cols.push(width..width + a);
                width += a;
            }
        }
        let mut strategy = Array2::zeros((m, width));
        for c in &cols {
            strategy.slice_mut(s![.., c.clone()]).fill(1.0 / c.len() as f64);
        }
        AdvisorRound {
            round,
            nodes,
            cols,
            regret: Array2::zeros((m, width)),
            average: Array2::zeros((m, width)),
            strategy,
        }
    }

    pub fn advisors(&self) -> usize {
        self.regret.nrows()
    }

    fn index(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&d| d == node)
    }

    fn refresh_strategy(&mut self) {
        let mut out = vec![0.0; 0];
        for c in &self.cols {
            out.resize(c.len(), 0.0);
            for p in 0..self.regret.nrows() {
                let r: Vec<f64> = self.regret.slice(s![p, c.clone()]).to_vec();
                regret_matching(&r, &mut out);
                self.strategy
                    .slice_mut(s![p, c.clone()])
                    .iter_mut()
                    .zip(&out)
                    .for_each(|(x, y)| *x = *y);
            }
        }
    }
}

/// One block's advisor state, detached from its round.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvisorBlock {
    pub key: InfoBlockKey,
    pub node: usize,
    /// Infoset classes mapped into the block.
    pub n: usize,
    pub regret: Array2<f64>,
    pub strategy: Array2<f64>,
    pub average: Array2<f64>,
    pub iteration: u64,
}

impl AdvisorBlock {
    pub fn advisors(&self) -> usize {
        self.regret.nrows()
    }

    pub fn actions(&self) -> usize {
        self.regret.ncols()
    }
}

/// Embedding CFR: tabular rounds below `abstract_from`, advisor space above.
#[derive(Clone, Debug)]
pub struct EmbeddingCfr {
    game: Arc<Game>,
    provider: EmbeddingProvider,
    config: EmbeddingConfig,
    regret_sum: RowTable,
    avg_num: RowTable,
    rounds: Vec<Option<AdvisorRound>>,
    /// σ^{t+1} read out for every class.
    current: RowTable,
    stats: ClassStats,
    iteration: u64,
}

impl EmbeddingCfr {
    pub fn new(game: Arc<Game>, provider: EmbeddingProvider, config: EmbeddingConfig) -> Result<Self> {
        let nr = game.num_rounds();
        let mut tab_rows = vec![0; nr];
        let mut rounds = vec![None; nr];
        for r in 0..nr {
            if r < config.abstract_from {
                tab_rows[r] = game.hands.num_classes(r);
            } else {
                let m = provider.advisors(r).ok_or(Error::UntrainedRound(r + 1))?;
                rounds[r] = Some(AdvisorRound::new(&game, r, m));
            }
        }
        if let Sampling::Deals { budget: 0, .. } = config.sampling {
            return contract("sampling budget must be positive");
        }
        let tab = Arc::new(Layout::new(&game, &tab_rows));
        let classes = Arc::new(Layout::classes(&game));
        let mut solver = EmbeddingCfr {
            regret_sum: RowTable::zeros(tab.clone()),
            avg_num: RowTable::zeros(tab),
            current: RowTable::uniform(classes.clone()),
            stats: ClassStats::new(classes),
            rounds,
            provider,
            iteration: 0,
            game,
            config,
        };
        if !solver.config.weighted_average {
            for ar in solver.rounds.iter_mut().flatten() {
                let sigma = ar.strategy.clone();
                accumulate_average(&mut ar.average, sigma.view(), 0);
            }
        }
        Ok(solver)
    }

    pub fn game(&self) -> &Arc<Game> {
        &self.game
    }

    pub fn provider(&self) -> &EmbeddingProvider {
        &self.provider
    }

    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn is_abstracted(&self, node: usize) -> bool {
        self.rounds[self.game.tree.nodes[node].round].is_some()
    }

    pub fn advisor_round(&self, round: usize) -> Option<&AdvisorRound> {
        self.rounds.get(round).and_then(|r| r.as_ref())
    }

    /// Copies out one block's advisor matrices.
    pub fn block(&self, node: usize) -> Option<AdvisorBlock> {
        let ar = self.advisor_round(self.game.tree.nodes[node].round)?;
        let i = ar.index(node)?;
        let c = ar.cols[i].clone();
        Some(AdvisorBlock {
            key: self.game.tree.block_key(node)?,
            node,
            n: self.game.hands.num_classes(ar.round),
            regret: ar.regret.slice(s![.., c.clone()]).to_owned(),
            strategy: ar.strategy.slice(s![.., c.clone()]).to_owned(),
            average: ar.average.slice(s![.., c]).to_owned(),
            iteration: self.iteration,
        })
    }

    /// Every advisor block in tree order.
    pub fn blocks(&self) -> Vec<AdvisorBlock> {
        self.rounds
            .iter()
            .flatten()
            .flat_map(|ar| ar.nodes.iter().map(|&d| self.block(d).expect("block")))
            .collect()
    }

    /// One iteration: a pass per player against the recovered profile, then the
    /// advisor regret push, regret matching and average update.
    pub fn iterate(&mut self) {
        let sample = self.draw_sample();
        self.stats.clear();
        let chance = match &sample {
            Some(s) => Chance::Sampled(s),
            None => Chance::Exact,
        };
        for p in 0..2 {
            traverse(&self.game, &self.current, p, false, chance, &mut self.stats);
        }
        self.absorb();
    }

    /// The iteration with one block's classes all playing advisor row `forced`.
    pub(crate) fn iterate_forced(&mut self, node: usize, forced: &[f64]) {
        let sample = self.draw_sample();
        self.stats.clear();
        let chance = match &sample {
            Some(s) => Chance::Sampled(s),
            None => Chance::Exact,
        };
        let policy = Forced {
            base: &self.current,
            node,
            row: forced,
        };
        for p in 0..2 {
            traverse(&self.game, &policy, p, false, chance, &mut self.stats);
        }
    }

    pub(crate) fn stats(&self) -> &ClassStats {
        &self.stats
    }

    fn draw_sample(&self) -> Option<DealSample> {
        match self.config.sampling {
            Sampling::Exact => None,
            Sampling::Deals { budget, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(self.iteration + 1);
                Some(DealSample::draw(&self.game, budget, &mut rng))
            }
        }
    }

    /// Folds the gathered class stats into the tables and advances `T`.
    pub(crate) fn absorb(&mut self) {
        let t = self.iteration + 1;
        let game = self.game.clone();
        let stats = &self.stats;
        let layout = stats.regret.layout.clone();
        for &d in &game.tree.decisions {
            let round = layout.round[d];
            if self.rounds[round].is_some() {
                continue;
            }
            let na = layout.actions[d];
            for c in 0..layout.rows[d] {
                let reach = stats.reach[layout.slot[d] + c];
                for (s, r) in self.regret_sum.row_mut(d, c).iter_mut().zip(stats.regret.row(d, c)) {
                    *s += r;
                }
                let sigma = self.current.row(d, c);
                let num = self.avg_num.row_mut(d, c);
                for a in 0..na {
                    num[a] += reach * sigma[a];
                }
            }
        }
        for ar in self.rounds.iter_mut().flatten() {
            let phi = self.provider.matrix(ar.round).expect("provider round");
            let n = phi.nrows();
            let width = ar.regret.ncols();
            let mut imm = Array2::<f64>::zeros((n, width));
            for (&d, c) in ar.nodes.iter().zip(&ar.cols) {
                let block = ArrayView2::from_shape((n, c.len()), stats.regret.block(d)).expect("block shape");
                imm.slice_mut(s![.., c.clone()]).assign(&block);
            }
            let push = phi.t().dot(&imm);
            let tf = t as f64;
            ar.regret.zip_mut_with(&push, |r, p| *r = (*r * (tf - 1.0) + p) / tf);
            if self.config.weighted_average {
                for (&d, c) in ar.nodes.iter().zip(&ar.cols) {
                    let slot = layout.slot[d];
                    let pi = ndarray::aview1(&stats.reach[slot..slot + n]);
                    let w = phi.t().dot(&pi);
                    let mut avg = ar.average.slice_mut(s![.., c.clone()]);
                    let sigma = ar.strategy.slice(s![.., c.clone()]);
                    for (p, wp) in w.iter().enumerate() {
                        avg.row_mut(p).scaled_add(*wp, &sigma.row(p));
                    }
                }
                ar.refresh_strategy();
            } else {
                ar.refresh_strategy();
                accumulate_average(&mut ar.average, ar.strategy.view(), t);
            }
        }
        self.iteration = t;
        self.refresh_current();
    }

    fn refresh_current(&mut self) {
        let layout = self.current.layout.clone();
        for &d in &self.game.tree.decisions {
            if self.rounds[layout.round[d]].is_some() {
                continue;
            }
            for c in 0..layout.rows[d] {
                let r = layout.range(d, c);
                regret_matching(self.regret_sum.row(d, c), &mut self.current.data[r]);
            }
        }
        for ar in self.rounds.iter().flatten() {
            let phi = self.provider.matrix(ar.round).expect("provider round");
            scatter(&mut self.current, ar, &phi.dot(&ar.strategy));
        }
    }

    /// σ^{T+1} for every class.
    pub fn current_classes(&self) -> &RowTable {
        &self.current
    }

    /// The average strategy for every class: normalized tabular numerators,
    /// `Φᵀ σ̄(E, ·)` elsewhere.
    pub fn average_classes(&self) -> RowTable {
        let mut out = RowTable::zeros(self.current.layout.clone());
        let layout = out.layout.clone();
        for &d in &self.game.tree.decisions {
            if self.rounds[layout.round[d]].is_some() {
                continue;
            }
            for c in 0..layout.rows[d] {
                let row = out.row_mut(d, c);
                row.copy_from_slice(self.avg_num.row(d, c));
                normalize_or_uniform(row);
            }
        }
        for ar in self.rounds.iter().flatten() {
            let phi = self.provider.matrix(ar.round).expect("provider round");
            scatter(&mut out, ar, &phi.dot(&self.advisor_average(ar)));
        }
        out
    }

    /// `σ̄(E, ·)` as distributions.
    fn advisor_average(&self, ar: &AdvisorRound) -> Array2<f64> {
        let mut avg = ar.average.clone();
        if self.config.weighted_average {
            for c in &ar.cols {
                for mut row in avg.slice_mut(s![.., c.clone()]).axis_iter_mut(Axis(0)) {
                    let mut v = row.to_vec();
                    normalize_or_uniform(&mut v);
                    row.iter_mut().zip(v).for_each(|(x, y)| *x = y);
                }
            }
        }
        avg
    }

    /// Time-averaged cumulative regret of a class: the tabular value, or
    /// `Φ_{·,q}ᵀ R̃(E, ·)` in an abstracted round.
    pub fn cumulative_regret(&self, node: usize, class: usize) -> Vec<f64> {
        let round = self.game.tree.nodes[node].round;
        match &self.rounds[round] {
            None => {
                let t = self.iteration.max(1) as f64;
                self.regret_sum.row(node, class).iter().map(|r| r / t).collect()
            }
            Some(ar) => {
                let c = ar.cols[ar.index(node).expect("block")].clone();
                let coords = self.provider.coords(round, class as u32).expect("provider round");
                project(ar.regret.slice(s![.., c]), coords).expect("coordinate length")
            }
        }
    }

    /// Restores a block's matrices. Shapes must match.
    pub fn set_block(&mut self, block: &AdvisorBlock) -> Result<()> {
        let round = self.game.tree.nodes[block.node].round;
        let Some(ar) = self.rounds[round].as_mut() else {
            return contract(format!("block {} is not abstracted", block.key));
        };
        let Some(i) = ar.index(block.node) else {
            return contract(format!("no block {}", block.key));
        };
        let c = ar.cols[i].clone();
        if block.regret.dim() != (ar.advisors(), c.len())
            || block.strategy.dim() != block.regret.dim()
            || block.average.dim() != block.regret.dim()
        {
            return contract(format!("block {} has the wrong shape", block.key));
        }
        ar.regret.slice_mut(s![.., c.clone()]).assign(&block.regret);
        ar.strategy.slice_mut(s![.., c.clone()]).assign(&block.strategy);
        ar.average.slice_mut(s![.., c]).assign(&block.average);
        Ok(())
    }

    /// Tabular regret sums and average numerators (rows only exist below `abstract_from`).
    pub fn tabular_state(&self) -> (&RowTable, &RowTable) {
        (&self.regret_sum, &self.avg_num)
    }

    /// Restores the tabular part and the iteration count, then recomputes σ.
    pub fn set_tabular_state(&mut self, regret_sum: RowTable, avg_num: RowTable, iteration: u64) -> Result<()> {
        if regret_sum.layout != self.regret_sum.layout || avg_num.layout != self.avg_num.layout {
            return contract("tabular state layout does not match this game");
        }
        self.regret_sum = regret_sum;
        self.avg_num = avg_num;
        self.iteration = iteration;
        self.refresh_current();
        Ok(())
    }
}

/// Copies a round's `classes × Σ|A|` product into the per-class table.
fn scatter(out: &mut RowTable, ar: &AdvisorRound, q: &Array2<f64>) {
    for (&d, c) in ar.nodes.iter().zip(&ar.cols) {
        let block = out.block_mut(d);
        let na = c.len();
        for (k, row) in q.slice(s![.., c.clone()]).axis_iter(Axis(0)).enumerate() {
            block[k * na..(k + 1) * na].iter_mut().zip(row).for_each(|(x, y)| *x = *y);
        }
    }
}

/// The recovered profile with one node's classes overridden by a fixed row.
pub(crate) struct Forced<'a> {
    pub base: &'a RowTable,
    pub node: usize,
    pub row: &'a [f64],
}

impl Policy for Forced<'_> {
    fn strategy(&self, node: usize, class: u32) -> &[f64] {
        if node == self.node {
            self.row
        } else {
            self.base.row(node, class as usize)
        }
    }
}
