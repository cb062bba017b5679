//! Per-round coordinate matrices Φᵀ (one row per class, one column per advisor).

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed_net::{CoordinateCache, EmbeddingParams};
use crate::error::{contract, Result};
use crate::game::Game;

/// Row sums must be within this of 1.
const STOCHASTIC_TOL: f64 = 1e-9;

/// Embedding coordinates for the abstracted rounds. Rounds without a matrix
/// are solved tabularly.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingProvider {
    matrices: Vec<Option<Array2<f64>>>,
}

impl EmbeddingProvider {
    /// No round abstracted.
    pub fn empty(game: &Game) -> Self {
        EmbeddingProvider {
            matrices: vec![None; game.num_rounds()],
        }
    }

    /// Every round from `from` on gets `m = classes` and Φ = I.
    pub fn identity(game: &Game, from: usize) -> Self {
        let mut p = EmbeddingProvider::empty(game);
        for r in from..game.num_rounds() {
            p.matrices[r] = Some(Array2::eye(game.hands.num_classes(r)));
        }
        p
    }

    /// Every class of every round from `from` on puts all its mass on advisor 0 of `m`.
    pub fn single_advisor(game: &Game, from: usize, m: usize) -> Self {
        let mut p = EmbeddingProvider::empty(game);
        for r in from..game.num_rounds() {
            let mut phi = Array2::zeros((game.hands.num_classes(r), m.max(1)));
            phi.column_mut(0).fill(1.0);
            p.matrices[r] = Some(phi);
        }
        p
    }

    /// One-hot coordinates, class `q` on advisor `q mod m`.
    pub fn round_robin(game: &Game, from: usize, m: usize) -> Self {
        let mut p = EmbeddingProvider::empty(game);
        for r in from..game.num_rounds() {
            let n = game.hands.num_classes(r);
            let mut phi = Array2::zeros((n, m));
            for q in 0..n {
                phi[[q, q % m]] = 1.0;
            }
            p.matrices[r] = Some(phi);
        }
        p
    }

    /// Dense random coordinates, seeded.
    pub fn random(game: &Game, from: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = EmbeddingProvider::empty(game);
        for r in from..game.num_rounds() {
            let n = game.hands.num_classes(r);
            let mut phi = Array2::from_shape_fn((n, m), |_| -rng.gen::<f64>().max(1e-300).ln());
            for mut row in phi.rows_mut() {
                let s = row.sum();
                row.mapv_inplace(|x| x / s);
            }
            p.matrices[r] = Some(phi);
        }
        p
    }

    /// Sets one round's `classes × m` matrix after checking shape and row sums.
    pub fn set_round(&mut self, game: &Game, round: usize, phi: Array2<f64>) -> Result<()> {
        if round >= self.matrices.len() {
            return contract(format!("round {} out of range", round + 1));
        }
        let n = game.hands.num_classes(round);
        if phi.nrows() != n || phi.ncols() == 0 {
            return contract(format!("round {} needs {n} coordinate rows, got {}", round + 1, phi.nrows()));
        }
        for (q, row) in phi.rows().into_iter().enumerate() {
            let s: f64 = row.sum();
            if row.iter().any(|x| !x.is_finite() || *x < 0.0) || (s - 1.0).abs() > STOCHASTIC_TOL {
                return contract(format!("round {} class {q}: coordinates are not a distribution", round + 1));
            }
        }
        self.matrices[round] = Some(phi.as_standard_layout().into_owned());
        Ok(())
    }

    /// Takes a network's cached coordinates, renormalizing the f32 softmax rows in f64.
    pub fn set_from_cache(&mut self, game: &Game, cache: &CoordinateCache) -> Result<()> {
        let mut phi = cache.coords.clone();
        for mut row in phi.rows_mut() {
            let s = row.sum();
            row.mapv_inplace(|x| x / s);
        }
        self.set_round(game, cache.round, phi)
    }

    /// Evaluates trained networks, one per abstracted round (`nets[k]` is round `from + k`).
    pub fn from_networks(game: &Game, from: usize, nets: &[EmbeddingParams<f32>]) -> Result<Self> {
        let mut p = EmbeddingProvider::empty(game);
        for (k, net) in nets.iter().enumerate() {
            let cache = CoordinateCache::build(game, net, from + k)?;
            p.set_from_cache(game, &cache)?;
        }
        Ok(p)
    }

    pub fn matrix(&self, round: usize) -> Option<&Array2<f64>> {
        self.matrices.get(round).and_then(|m| m.as_ref())
    }

    pub fn advisors(&self, round: usize) -> Option<usize> {
        self.matrix(round).map(|m| m.ncols())
    }

    /// Coordinates of one class: column `q` of Φ.
    pub fn coords(&self, round: usize, class: u32) -> Option<&[f64]> {
        self.matrix(round)
            .map(|m| m.row(class as usize).to_slice().expect("row-major"))
    }
}
