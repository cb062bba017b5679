//! The single-advisor scenario: every class of one block acts with one
//! advisor's strategy, and that advisor's embedded positive regret
//! `S_p = Σ_a R(e_p, a)_+²` is tracked against the two decrease bounds.

use std::sync::Arc;

use ndarray::{s, Array2, ArrayView2};

use super::{accumulate_average, advisor_regret_matching, AdvisorBlock, EmbeddingCfr, Forced};
use crate::error::{contract, Result};
use crate::game::Game;
use crate::solver::{traverse_focused, Chance, ClassStats, Layout, RowTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `S^T ≤ C/T`: the bound is `C/(T+1)`.
    BelowThreshold,
    /// `S^T > C/T`: the bound is `T/(T+1) · S^T`.
    AboveThreshold,
}

/// One forced step of advisor `p` in one block.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretDecreaseReport {
    /// `T` before the step.
    pub iteration: u64,
    pub advisor: usize,
    pub n: usize,
    pub actions: usize,
    /// Terminal payoff range, bounding every class-level regret.
    pub delta: f64,
    /// `‖Φ_{p,·}‖²`.
    pub phi_norm_sq: f64,
    /// `C = n · |A| · Δ² · ‖Φ_{p,·}‖²`.
    pub threshold: f64,
    pub s_before: f64,
    pub s_after: f64,
    /// `Σ_a R^T(e_p, a)_+ · r^{T+1}(e_p, a)`, zero in exact arithmetic.
    pub cross_term: f64,
    /// `Σ_a r^{T+1}(e_p, a)²`.
    pub immediate_sq: f64,
    /// Largest `|v(I, a) − v(I, a')|` seen over the block's classes.
    pub max_value_gap: f64,
    pub regime: Regime,
    pub bound: f64,
    /// `(T² S^T + 2T · cross + Σ r²) / (T+1)²`, the bound before the regime split.
    pub sharp_bound: f64,
}

impl RegretDecreaseReport {
    fn compute(
        t: u64,
        p: usize,
        phi_col: &[f64],
        before: &[f64],
        after: &[f64],
        imm: ArrayView2<'_, f64>,
        delta: f64,
    ) -> Self {
        let (n, na) = imm.dim();
        let pos_sq = |row: &[f64]| row.iter().map(|r| r.max(0.0).powi(2)).sum::<f64>();
        let mut r = vec![0.0; na];
        let mut max_gap = 0.0f64;
        for (q, row) in imm.outer_iter().enumerate() {
            for a in 0..na {
                r[a] += phi_col[q] * row[a];
            }
            let hi = row.iter().copied().fold(f64::MIN, f64::max);
            let lo = row.iter().copied().fold(f64::MAX, f64::min);
            max_gap = max_gap.max(hi - lo);
        }
        let cross_term: f64 = before.iter().zip(&r).map(|(b, x)| b.max(0.0) * x).sum();
        let immediate_sq: f64 = r.iter().map(|x| x * x).sum();
        let phi_norm_sq: f64 = phi_col.iter().map(|x| x * x).sum();
        let threshold = n as f64 * na as f64 * delta * delta * phi_norm_sq;
        let s_before = pos_sq(before);
        let tf = t as f64;
        let (regime, bound) = if t == 0 || s_before <= threshold / tf {
            (Regime::BelowThreshold, threshold / (tf + 1.0))
        } else {
            (Regime::AboveThreshold, tf / (tf + 1.0) * s_before)
        };
        RegretDecreaseReport {
            iteration: t,
            advisor: p,
            n,
            actions: na,
            delta,
            phi_norm_sq,
            threshold,
            s_before,
            s_after: pos_sq(after),
            cross_term,
            immediate_sq,
            max_value_gap: max_gap,
            regime,
            bound,
            sharp_bound: (tf * tf * s_before + 2.0 * tf * cross_term + immediate_sq) / ((tf + 1.0) * (tf + 1.0)),
        }
    }

    /// Whether `S^{T+1}` respects the regime's bound within `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.s_after <= self.bound + tol
    }
}

impl EmbeddingCfr {
    /// Runs one full iteration in which every class of `node`'s block plays
    /// `σ(e_p, ·)`, and reports on advisor `p`.
    pub fn single_advisor_scenario_step(&mut self, node: usize, p: usize) -> Result<RegretDecreaseReport> {
        let Some(block) = self.block(node) else {
            return contract(format!("node {node} is not an abstracted decision node"));
        };
        if p >= block.advisors() {
            return contract(format!("advisor {p} out of {}", block.advisors()));
        }
        let t = self.iteration();
        let forced = block.strategy.row(p).to_vec();
        let before = block.regret.row(p).to_vec();
        self.iterate_forced(node, &forced);
        let imm = ArrayView2::from_shape((block.n, block.actions()), self.stats().regret.block(node))
            .expect("block shape")
            .to_owned();
        self.absorb();
        let after = self.block(node).expect("block").regret.row(p).to_vec();
        let phi = self.provider().matrix(block.key.round).expect("provider round");
        let phi_col = phi.column(p).to_vec();
        Ok(RegretDecreaseReport::compute(
            t,
            p,
            &phi_col,
            &before,
            &after,
            imm.view(),
            self.game().tree.utility_range(),
        ))
    }
}

/// The scenario restricted to a single block: the rest of the profile is
/// frozen and only the block's subtree is walked each step.
#[derive(Clone, Debug)]
pub struct SingleAdvisorScenario {
    game: Arc<Game>,
    profile: RowTable,
    phi: Array2<f64>,
    block: AdvisorBlock,
    advisor: usize,
    stats: ClassStats,
}

impl SingleAdvisorScenario {
    /// A fresh block (zero regret, uniform advisors) at `node`, with `phi`
    /// (`classes × m`) as the round's coordinates and `profile` everywhere else.
    pub fn new(game: Arc<Game>, profile: RowTable, node: usize, phi: Array2<f64>, advisor: usize) -> Result<Self> {
        let Some(key) = game.tree.block_key(node) else {
            return contract(format!("node {node} is not a decision node"));
        };
        let n = game.hands.num_classes(key.round);
        let na = game.tree.num_actions(node);
        let m = phi.ncols();
        if phi.nrows() != n || advisor >= m {
            return contract(format!("coordinates {:?} do not fit {n} classes / advisor {advisor}", phi.dim()));
        }
        let classes = Arc::new(Layout::classes(&game));
        if profile.layout != classes {
            return contract("profile must have one row per class");
        }
        let uniform = Array2::from_elem((m, na), 1.0 / na as f64);
        let block = AdvisorBlock {
            key,
            node,
            n,
            regret: Array2::zeros((m, na)),
            strategy: uniform.clone(),
            average: uniform,
            iteration: 0,
        };
        Ok(SingleAdvisorScenario {
            stats: ClassStats::new(classes),
            game,
            profile,
            phi,
            block,
            advisor,
        })
    }

    /// Starts from a solver's current profile and block state.
    pub fn from_solver(solver: &EmbeddingCfr, node: usize, advisor: usize) -> Result<Self> {
        let Some(block) = solver.block(node) else {
            return contract(format!("node {node} is not an abstracted decision node"));
        };
        let phi = solver.provider().matrix(block.key.round).expect("provider round").clone();
        let mut sc = SingleAdvisorScenario::new(
            solver.game().clone(),
            solver.current_classes().clone(),
            node,
            phi,
            advisor,
        )?;
        sc.block = block;
        Ok(sc)
    }

    pub fn block(&self) -> &AdvisorBlock {
        &self.block
    }

    pub fn step(&mut self) -> RegretDecreaseReport {
        let node = self.block.node;
        let p = self.advisor;
        let t = self.block.iteration;
        let forced = self.block.strategy.row(p).to_vec();
        let before = self.block.regret.row(p).to_vec();
        self.stats.clear();
        let policy = Forced {
            base: &self.profile,
            node,
            row: &forced,
        };
        let player = self.block.key.player;
        traverse_focused(&self.game, &policy, player, false, Chance::Exact, Some(node), &mut self.stats);
        let imm = ArrayView2::from_shape((self.block.n, forced.len()), self.stats.regret.block(node)).expect("block shape");
        let push = self.phi.t().dot(&imm);
        let tn = t + 1;
        let tf = tn as f64;
        self.block
            .regret
            .zip_mut_with(&push, |r, x| *r = (*r * (tf - 1.0) + x) / tf);
        advisor_regret_matching(self.block.regret.view(), &mut self.block.strategy);
        accumulate_average(&mut self.block.average, self.block.strategy.view(), tn);
        self.block.iteration = tn;
        let after = self.block.regret.row(p).to_vec();
        let phi_col = self.phi.slice(s![.., p]).to_vec();
        RegretDecreaseReport::compute(t, p, &phi_col, &before, &after, imm, self.game.tree.utility_range())
    }
}
