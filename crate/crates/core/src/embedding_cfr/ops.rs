//! Advisor-space kernels on plain `m × |A|` matrices.

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{contract, Result};
use crate::solver::regret_matching;

/// `Σ_p φ_p M(e_p, ·)` for any advisor matrix `M`.
pub fn project(advisors: ArrayView2<'_, f64>, coords: &[f64]) -> Result<Vec<f64>> {
    if coords.len() != advisors.nrows() {
        return contract(format!("{} coordinates for {} advisors", coords.len(), advisors.nrows()));
    }
    let mut out = vec![0.0; advisors.ncols()];
    for (phi, row) in coords.iter().zip(advisors.axis_iter(Axis(0))) {
        if *phi != 0.0 {
            for (o, s) in out.iter_mut().zip(row) {
                *o += phi * s;
            }
        }
    }
    Ok(out)
}

/// `Σ_p φ_p σ(e_p, ·)`; a distribution whenever `coords` is one.
pub fn query_strategy(advisors: ArrayView2<'_, f64>, coords: &[f64]) -> Result<Vec<f64>> {
    let out = project(advisors, coords)?;
    debug_assert!((out.iter().sum::<f64>() - coords.iter().sum::<f64>()).abs() < 1e-6);
    Ok(out)
}

/// The final-strategy read: [`query_strategy`] applied to `σ̄(E, ·)`.
pub fn recover_average_strategy(average: ArrayView2<'_, f64>, coords: &[f64]) -> Result<Vec<f64>> {
    query_strategy(average, coords)
}

/// Ages `regret` to iteration `t` (`t ≥ 1`) and adds `(1/t) Σ_k φ_k ⊗ r_k`
/// over the visited `(coords, immediate regret)` pairs.
pub fn accumulate_sampled_regret(regret: &mut Array2<f64>, t: u64, visited: &[(&[f64], &[f64])]) -> Result<()> {
    if t == 0 {
        return contract("iteration counter starts at 1");
    }
    let (m, na) = regret.dim();
    for (coords, r) in visited {
        if coords.len() != m || r.len() != na {
            return contract(format!("visit of shape {}x{} against a {m}x{na} table", coords.len(), r.len()));
        }
    }
    let t = t as f64;
    regret.mapv_inplace(|x| x * (t - 1.0) / t);
    for (coords, r) in visited {
        for (p, phi) in coords.iter().enumerate() {
            if *phi != 0.0 {
                for (a, ra) in r.iter().enumerate() {
                    regret[[p, a]] += phi * ra / t;
                }
            }
        }
    }
    Ok(())
}

/// Row-wise regret matching, `σ(e_p, ·) ∝ R(e_p, ·)_+`.
pub fn advisor_regret_matching(regret: ArrayView2<'_, f64>, strategy: &mut Array2<f64>) {
    let mut row = vec![0.0; regret.ncols()];
    for (r, mut s) in regret.axis_iter(Axis(0)).zip(strategy.axis_iter_mut(Axis(0))) {
        let cumulative: Vec<f64> = r.iter().copied().collect();
        regret_matching(&cumulative, &mut row);
        s.iter_mut().zip(&row).for_each(|(x, y)| *x = *y);
    }
}

/// `σ̄ ← t/(t+1) σ̄ + σ/(t+1)`; with `t = 0` this copies `σ`.
pub fn accumulate_average(average: &mut Array2<f64>, strategy: ArrayView2<'_, f64>, t: u64) {
    let t = t as f64;
    average.zip_mut_with(&strategy, |a, s| *a = (t * *a + s) / (t + 1.0));
}
