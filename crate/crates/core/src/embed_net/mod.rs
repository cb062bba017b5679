//! The hand embedding network: hands become `[suits, ranks, s]` tensors, a
//! per-suit convolution and a softmax bottleneck produce advisor coordinates,
//! and a linear head regresses the hand's strength tensor.
//!
//! Everything is generic over the float type so gradient checks can run in
//! f64 while training and checkpoints use f32.

mod checkpoint;

use std::fmt::Debug;
use std::io::Write;

use ndarray::{s, Array1, Array2, Axis, LinalgScalar, ScalarOperand};
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Result};
use crate::game::{Game, InfoSetKey};
use crate::hand_strength::{CanonicalHand, StrengthTable};

pub use checkpoint::{load_params, read_params, save_params, write_params, NET_MAGIC};

pub trait NetFloat: LinalgScalar + Float + ScalarOperand + Debug + Send + Sync + 'static {}
impl NetFloat for f32 {}
impl NetFloat for f64 {}

fn cast<F: NetFloat>(x: f64) -> F {
    F::from(x).expect("representable")
}

/// Binary `[suits, ranks, s]` image of a canonical hand, flattened row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HandTensor {
    pub suits: usize,
    pub ranks: usize,
    pub rounds: usize,
    pub data: Vec<f32>,
}

impl HandTensor {
    pub fn ones(&self) -> usize {
        self.data.iter().filter(|&&x| x == 1.0).count()
    }

    pub fn at(&self, suit: usize, rank: usize, round: usize) -> f32 {
        self.data[(suit * self.ranks + rank) * self.rounds + round]
    }
}

/// Encodes `hand` through `round` (0-based); longer hands are cut and re-canonicalized.
pub fn encode(hand: &CanonicalHand, round: usize, num_ranks: usize) -> Result<HandTensor> {
    if hand.num_rounds() <= round {
        return contract(format!("hand has {} rounds, {} requested", hand.num_rounds(), round + 1));
    }
    let hand = if hand.num_rounds() > round + 1 {
        hand.prefix(round + 1)
    } else {
        hand.clone()
    };
    let suits = hand.num_suits();
    let s = round + 1;
    let mut data = vec![0.0f32; suits * num_ranks * s];
    for t in 0..s {
        for c in hand.round_cards(t) {
            data[(c.suit as usize * num_ranks + c.rank as usize) * s + t] = 1.0;
        }
    }
    Ok(HandTensor {
        suits,
        ranks: num_ranks,
        rounds: s,
        data,
    })
}

/// Network weights. Kernels are `[ranks × s]` and shared across suit channels.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingParams<F> {
    pub suits: usize,
    pub ranks: usize,
    pub rounds: usize,
    pub kernels: usize,
    pub m: usize,
    /// `K × (ranks·s)`
    pub conv_w: Array2<F>,
    pub conv_b: Array1<F>,
    /// `m × (K·suits)`; the intermediate vector is suit-major.
    pub w1: Array2<F>,
    pub b1: Array1<F>,
    /// `(3·s) × m`
    pub w2: Array2<F>,
    pub b2: Array1<F>,
}

impl<F: NetFloat> EmbeddingParams<F> {
    pub fn zeros(suits: usize, ranks: usize, rounds: usize, kernels: usize, m: usize) -> Self {
        EmbeddingParams {
            suits,
            ranks,
            rounds,
            kernels,
            m,
            conv_w: Array2::zeros((kernels, ranks * rounds)),
            conv_b: Array1::zeros(kernels),
            w1: Array2::zeros((m, kernels * suits)),
            b1: Array1::zeros(m),
            w2: Array2::zeros((3 * rounds, m)),
            b2: Array1::zeros(3 * rounds),
        }
    }

    /// Uniform Glorot initialization, biases zero.
    pub fn init<R: Rng + ?Sized>(suits: usize, ranks: usize, rounds: usize, kernels: usize, m: usize, rng: &mut R) -> Self {
        let mut p = Self::zeros(suits, ranks, rounds, kernels, m);
        let mut fill = |a: &mut Array2<F>| {
            let (o, i) = a.dim();
            let bound = (6.0 / (o + i) as f64).sqrt();
            a.mapv_inplace(|_| cast(rng.gen_range(-bound..bound)));
        };
        fill(&mut p.conv_w);
        fill(&mut p.w1);
        fill(&mut p.w2);
        p
    }

    pub fn input_len(&self) -> usize {
        self.suits * self.ranks * self.rounds
    }

    pub fn output_len(&self) -> usize {
        3 * self.rounds
    }

    pub fn num_params(&self) -> usize {
        self.conv_w.len() + self.conv_b.len() + self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Every parameter in checkpoint order.
    pub fn flat(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(self.num_params());
        out.extend(self.conv_w.iter());
        out.extend(self.conv_b.iter());
        out.extend(self.w1.iter());
        out.extend(self.b1.iter());
        out.extend(self.w2.iter());
        out.extend(self.b2.iter());
        out
    }

    pub fn set_flat(&mut self, values: &[F]) -> Result<()> {
        if values.len() != self.num_params() {
            return contract(format!("expected {} parameters, got {}", self.num_params(), values.len()));
        }
        let mut it = values.iter().copied();
        for x in self
            .conv_w
            .iter_mut()
            .chain(self.conv_b.iter_mut())
            .chain(self.w1.iter_mut())
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
        {
            *x = it.next().expect("length checked");
        }
        Ok(())
    }

    /// `self += scale · other`
    pub fn axpy(&mut self, scale: F, other: &Self) {
        self.conv_w.scaled_add(scale, &other.conv_w);
        self.conv_b.scaled_add(scale, &other.conv_b);
        self.w1.scaled_add(scale, &other.w1);
        self.b1.scaled_add(scale, &other.b1);
        self.w2.scaled_add(scale, &other.w2);
        self.b2.scaled_add(scale, &other.b2);
    }

    pub fn convert<G: NetFloat>(&self) -> EmbeddingParams<G> {
        let c2 = |a: &Array2<F>| a.mapv(|x| cast::<G>(x.to_f64().expect("finite")));
        let c1 = |a: &Array1<F>| a.mapv(|x| cast::<G>(x.to_f64().expect("finite")));
        EmbeddingParams {
            suits: self.suits,
            ranks: self.ranks,
            rounds: self.rounds,
            kernels: self.kernels,
            m: self.m,
            conv_w: c2(&self.conv_w),
            conv_b: c1(&self.conv_b),
            w1: c2(&self.w1),
            b1: c1(&self.b1),
            w2: c2(&self.w2),
            b2: c1(&self.b2),
        }
    }
}

/// Intermediate activations kept for the backward pass.
struct Forward<F> {
    /// `(B·suits) × K` pre-activation of the convolution.
    pre: Array2<F>,
    /// `B × (K·suits)` after the rectifier.
    hidden: Array2<F>,
    coords: Array2<F>,
    pred: Array2<F>,
}

fn check_batch<F: NetFloat>(p: &EmbeddingParams<F>, x: &Array2<F>) -> Result<()> {
    if x.ncols() != p.input_len() {
        return contract(format!("input width {} does not match network input {}", x.ncols(), p.input_len()));
    }
    Ok(())
}

fn forward_batch<F: NetFloat>(p: &EmbeddingParams<F>, x: &Array2<F>) -> Forward<F> {
    let b = x.nrows();
    let per_suit = p.ranks * p.rounds;
    let xs = x
        .to_shape((b * p.suits, per_suit))
        .expect("contiguous input")
        .to_owned();
    let pre = xs.dot(&p.conv_w.t()) + &p.conv_b;
    let hidden = pre
        .mapv(|v| v.max(F::zero()))
        .into_shape((b, p.suits * p.kernels))
        .expect("contiguous");
    let z = hidden.dot(&p.w1.t()) + &p.b1;
    let coords = softmax_rows(z);
    let pred = coords.dot(&p.w2.t()) + &p.b2;
    Forward {
        pre,
        hidden,
        coords,
        pred,
    }
}

fn softmax_rows<F: NetFloat>(mut z: Array2<F>) -> Array2<F> {
    for mut row in z.rows_mut() {
        let max = row.iter().copied().fold(F::neg_infinity(), F::max);
        row.mapv_inplace(|v| (v - max).exp());
        let total = row.sum();
        row.mapv_inplace(|v| v / total);
    }
    z
}

/// Coordinates (`B × m`) and predictions (`B × 3s`) for a batch of flattened tensors.
pub fn forward<F: NetFloat>(p: &EmbeddingParams<F>, x: &Array2<F>) -> Result<(Array2<F>, Array2<F>)> {
    check_batch(p, x)?;
    let f = forward_batch(p, x);
    Ok((f.coords, f.pred))
}

/// Single-tensor convenience for [`forward`].
pub fn forward_one<F: NetFloat>(p: &EmbeddingParams<F>, x: &HandTensor) -> Result<(Vec<F>, Vec<F>)> {
    if (x.suits, x.ranks, x.rounds) != (p.suits, p.ranks, p.rounds) {
        return contract(format!(
            "tensor [{}, {}, {}] does not fit network [{}, {}, {}]",
            x.suits, x.ranks, x.rounds, p.suits, p.ranks, p.rounds
        ));
    }
    let row = Array2::from_shape_vec((1, x.data.len()), x.data.iter().map(|&v| cast::<F>(v as f64)).collect())
        .expect("shape");
    let (c, pr) = forward(p, &row)?;
    Ok((c.row(0).to_vec(), pr.row(0).to_vec()))
}

/// Mean squared error over batch × outputs and its gradient.
pub fn loss_and_grad<F: NetFloat>(p: &EmbeddingParams<F>, x: &Array2<F>, y: &Array2<F>) -> Result<(F, EmbeddingParams<F>)> {
    check_batch(p, x)?;
    if x.nrows() == 0 || y.dim() != (x.nrows(), p.output_len()) {
        return contract("batch must be nonempty with one target row per input");
    }
    let b = x.nrows();
    let f = forward_batch(p, x);
    let diff = &f.pred - y;
    let count = cast::<F>((b * p.output_len()) as f64);
    let loss = diff.mapv(|d| d * d).sum() / count;

    let d_pred = diff.mapv(|d| d * cast::<F>(2.0) / count);
    let w2 = d_pred.t().dot(&f.coords);
    let b2 = d_pred.sum_axis(Axis(0));
    let d_coords = d_pred.dot(&p.w2);
    let dot = (&d_coords * &f.coords).sum_axis(Axis(1)).insert_axis(Axis(1));
    let d_z = &f.coords * &(&d_coords - &dot);
    let w1 = d_z.t().dot(&f.hidden);
    let b1 = d_z.sum_axis(Axis(0));
    let d_hidden = d_z.dot(&p.w1);
    let mut d_pre = d_hidden
        .into_shape((b * p.suits, p.kernels))
        .expect("contiguous");
    ndarray::Zip::from(&mut d_pre).and(&f.pre).for_each(|g, &z| {
        if z <= F::zero() {
            *g = F::zero();
        }
    });
    let xs = x
        .to_shape((b * p.suits, p.ranks * p.rounds))
        .expect("contiguous input")
        .to_owned();
    let conv_w = d_pre.t().dot(&xs);
    let conv_b = d_pre.sum_axis(Axis(0));
    Ok((
        loss,
        EmbeddingParams {
            suits: p.suits,
            ranks: p.ranks,
            rounds: p.rounds,
            kernels: p.kernels,
            m: p.m,
            conv_w,
            conv_b,
            w1,
            b1,
            w2,
            b2,
        },
    ))
}

/// Max relative error between the analytic gradient and central differences
/// over every parameter.
pub fn gradient_check(p: &EmbeddingParams<f64>, x: &Array2<f64>, y: &Array2<f64>, step: f64) -> Result<f64> {
    let (_, grad) = loss_and_grad(p, x, y)?;
    let analytic = grad.flat();
    let base = p.flat();
    let mut probe = p.clone();
    let mut worst = 0.0f64;
    for i in 0..base.len() {
        let mut v = base.clone();
        v[i] = base[i] + step;
        probe.set_flat(&v)?;
        let (up, _) = loss_and_grad(&probe, x, y)?;
        v[i] = base[i] - step;
        probe.set_flat(&v)?;
        let (down, _) = loss_and_grad(&probe, x, y)?;
        let numeric = (up - down) / (2.0 * step);
        let err = (numeric - analytic[i]).abs() / numeric.abs().max(analytic[i].abs()).max(1e-8);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Update rule applied to each minibatch gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Optimizer {
    Sgd,
    /// Heavy-ball momentum with the given decay.
    Momentum(f64),
    /// Adam with the usual (0.9, 0.999, 1e-8) constants.
    Adam,
}

/// Training hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub m: usize,
    /// Kernel count × suits.
    pub width: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: Optimizer::Adam,
            learning_rate: 0.003,
            epochs: 60,
            batch_size: 64,
            seed: 0,
            m: 4,
            width: 500,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, suits: usize) -> Result<()> {
        if self.m < 2 {
            return contract("m must be at least 2");
        }
        if !(self.learning_rate > 0.0) || self.epochs == 0 || self.batch_size == 0 {
            return contract("learning rate, epochs and batch size must be positive");
        }
        if self.width < suits {
            return contract("intermediate width must cover one kernel per suit");
        }
        Ok(())
    }

    pub fn kernels(&self, suits: usize) -> usize {
        (self.width / suits).max(1)
    }
}

/// Default advisor count for a round: a tenth of the class count, at least 4.
pub fn default_m(classes: usize) -> usize {
    (classes / 10).max(4)
}

/// Inputs and strength targets for every class of one round.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub round: usize,
    pub x: Array2<f32>,
    pub y: Array2<f32>,
}

impl Dataset {
    pub fn build(game: &Game, strength: &StrengthTable, round: usize) -> Result<Self> {
        let hands = &game.hands;
        let classes = hands.num_classes(round);
        let ns = game.config.num_suits as usize;
        let nr = game.config.num_ranks as usize;
        let s = round + 1;
        let mut x = Array2::zeros((classes, ns * nr * s));
        let mut y = Array2::zeros((classes, 3 * s));
        for c in 0..classes {
            let t = encode(hands.class_hand(round, c as u32), round, nr)?;
            x.row_mut(c).assign(&Array1::from(t.data));
            let tensor = strength.tensor(hands, round, c as u32);
            for (i, v) in tensor.flat().into_iter().enumerate() {
                y[[c, i]] = v as f32;
            }
        }
        Ok(Dataset { round, x, y })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// MSE of predicting the per-output mean of the targets.
    pub fn mean_predictor_mse(&self) -> f64 {
        let y = self.y.mapv(|v| v as f64);
        let mean = y.mean_axis(Axis(0)).expect("nonempty");
        (&y - &mean).mapv(|d| d * d).mean().unwrap_or(0.0)
    }
}

/// Loss per epoch plus the final full-batch MSE.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub epoch_loss: Vec<f64>,
    pub final_mse: f64,
    pub baseline_mse: f64,
}

struct Stepper {
    optimizer: Optimizer,
    lr: f32,
    t: i32,
    first: Vec<f32>,
    second: Vec<f32>,
}

impl Stepper {
    fn new(config: &TrainConfig, params: &EmbeddingParams<f32>) -> Self {
        let n = match config.optimizer {
            Optimizer::Sgd => 0,
            _ => params.num_params(),
        };
        let second = if config.optimizer == Optimizer::Adam { n } else { 0 };
        Stepper {
            optimizer: config.optimizer,
            lr: config.learning_rate as f32,
            t: 0,
            first: vec![0.0; n],
            second: vec![0.0; second],
        }
    }

    fn apply(&mut self, params: &mut EmbeddingParams<f32>, grad: EmbeddingParams<f32>) -> Result<()> {
        match self.optimizer {
            Optimizer::Sgd => {
                params.axpy(-self.lr, &grad);
                return Ok(());
            }
            Optimizer::Momentum(beta) => {
                let beta = beta as f32;
                for (v, g) in self.first.iter_mut().zip(grad.flat()) {
                    *v = beta * *v + g;
                }
                let mut flat = params.flat();
                for (w, v) in flat.iter_mut().zip(&self.first) {
                    *w -= self.lr * v;
                }
                params.set_flat(&flat)
            }
            Optimizer::Adam => {
                let (b1, b2, eps) = (0.9f32, 0.999f32, 1e-8f32);
                self.t += 1;
                let c1 = 1.0 - b1.powi(self.t);
                let c2 = 1.0 - b2.powi(self.t);
                let mut flat = params.flat();
                for (i, g) in grad.flat().into_iter().enumerate() {
                    self.first[i] = b1 * self.first[i] + (1.0 - b1) * g;
                    self.second[i] = b2 * self.second[i] + (1.0 - b2) * g * g;
                    flat[i] -= self.lr * (self.first[i] / c1) / ((self.second[i] / c2).sqrt() + eps);
                }
                params.set_flat(&flat)
            }
        }
    }
}

/// Minibatch training with per-epoch seeded shuffling.
pub fn train_round(config: &TrainConfig, data: &Dataset, suits: usize, ranks: usize) -> Result<(EmbeddingParams<f32>, TrainReport)> {
    config.validate(suits)?;
    if data.is_empty() {
        return contract("empty dataset");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rounds = data.round + 1;
    let mut params = EmbeddingParams::<f32>::init(suits, ranks, rounds, config.kernels(suits), config.m, &mut rng);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut step = Stepper::new(config, &params);
    let mut epoch_loss = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let x = data.x.select(Axis(0), chunk);
            let y = data.y.select(Axis(0), chunk);
            let (loss, grad) = loss_and_grad(&params, &x, &y)?;
            step.apply(&mut params, grad)?;
            total += loss as f64 * chunk.len() as f64;
        }
        epoch_loss.push(total / data.len() as f64);
    }
    let (_, pred) = forward(&params, &data.x)?;
    let final_mse = (&pred - &data.y).mapv(|d| (d as f64) * (d as f64)).mean().unwrap_or(0.0);
    Ok((
        params,
        TrainReport {
            epoch_loss,
            final_mse,
            baseline_mse: data.mean_predictor_mse(),
        },
    ))
}

/// Coordinates of every class of one round, computed once after training.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateCache {
    pub round: usize,
    pub m: usize,
    /// `classes × m`, row per class id.
    pub coords: Array2<f64>,
}

impl CoordinateCache {
    pub fn build(game: &Game, params: &EmbeddingParams<f32>, round: usize) -> Result<Self> {
        let nr = game.config.num_ranks as usize;
        let classes = game.hands.num_classes(round);
        if params.rounds != round + 1 || params.ranks != nr || params.suits != game.config.num_suits as usize {
            return contract(format!("network shape does not fit round {}", round + 1));
        }
        let mut x = Array2::<f32>::zeros((classes, params.input_len()));
        for c in 0..classes {
            let t = encode(game.hands.class_hand(round, c as u32), round, nr)?;
            x.row_mut(c).assign(&Array1::from(t.data));
        }
        let mut coords = Array2::<f64>::zeros((classes, params.m));
        for start in (0..classes).step_by(1024) {
            let end = (start + 1024).min(classes);
            let (c, _) = forward(params, &x.slice(s![start..end, ..]).to_owned())?;
            coords
                .slice_mut(s![start..end, ..])
                .assign(&c.mapv(|v| v as f64));
        }
        Ok(CoordinateCache {
            round,
            m: params.m,
            coords,
        })
    }

    pub fn get(&self, class: u32) -> &[f64] {
        self.coords
            .row(class as usize)
            .to_slice()
            .expect("row-major")
    }

    /// `class,hand,phi_0,...` per class.
    pub fn write_csv<W: Write>(&self, game: &Game, out: &mut W) -> Result<()> {
        let header: Vec<String> = (0..self.m).map(|p| format!("phi_{p}")).collect();
        writeln!(out, "class,hand,{}", header.join(","))?;
        for (c, row) in self.coords.rows().into_iter().enumerate() {
            let hand = game.hands.class_hand(self.round, c as u32).notation(&game.config);
            let vals: Vec<String> = row.iter().map(|v| format!("{v:.8}")).collect();
            writeln!(out, "{c},{hand},{}", vals.join(","))?;
        }
        Ok(())
    }
}

/// Coordinates of an infoset: depends on the cards only, never on the betting trace.
pub fn embed(params: &EmbeddingParams<f32>, key: &InfoSetKey, num_ranks: usize) -> Result<Vec<f64>> {
    let t = encode(&key.hand, key.round(), num_ranks)?;
    let (coords, _) = forward_one(params, &t)?;
    Ok(coords.into_iter().map(|v| v as f64).collect())
}
