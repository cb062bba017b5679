//! Counterfactual values by explicit history enumeration. Exponential in the
//! game size; meant for Kuhn-sized games and as an oracle for the vectorized
//! traversal.

use super::strategy::StrategyTable;
use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::game::{Actor, HistoryNode, InfoSetKey};

/// Per-action values v^{σ|I→a}(I) and the infoset value v^σ(I).
#[derive(Clone, Debug, PartialEq)]
pub struct CfValues {
    pub action_values: Vec<f64>,
    pub value: f64,
}

fn lookup<'a>(profile: &'a StrategyTable, key: &InfoSetKey, config: &GameConfig) -> Result<&'a [f64]> {
    profile
        .get(key)
        .ok_or_else(|| Error::MissingInfoset(key.text(config)))
}

/// Expected utility of `player` from `node` with everyone following `profile`.
pub fn expected_utility(node: &HistoryNode, player: usize, profile: &StrategyTable, config: &GameConfig) -> Result<f64> {
    match node.to_act() {
        Actor::Terminal => Ok(node.utility(player, config)? as f64),
        Actor::Chance => {
            let mut v = 0.0;
            for (mv, p) in node.chance_outcomes(config)? {
                v += p * expected_utility(&node.apply(&mv, config)?, player, profile, config)?;
            }
            Ok(v)
        }
        Actor::Player(q) => {
            let sigma = lookup(profile, &node.infoset_key(q, config), config)?;
            let mut v = 0.0;
            for (a, s) in node.legal_actions(config)?.into_iter().zip(sigma) {
                if *s != 0.0 {
                    v += s * expected_utility(&node.apply_action(a, config)?, player, profile, config)?;
                }
            }
            Ok(v)
        }
    }
}

/// Counterfactual values of `key` under `profile`: the action values sum
/// π_{-i}(h) · u(h·a) over histories h in the infoset, and the infoset value
/// sums π_{-i}(h) · u(h) directly, without going through the action values.
pub fn counterfactual_value(config: &GameConfig, profile: &StrategyTable, key: &InfoSetKey) -> Result<CfValues> {
    let mut out = CfValues {
        action_values: Vec::new(),
        value: 0.0,
    };
    fn go(
        node: &HistoryNode,
        reach: f64,
        key: &InfoSetKey,
        profile: &StrategyTable,
        config: &GameConfig,
        out: &mut CfValues,
    ) -> Result<()> {
        match node.to_act() {
            Actor::Terminal => Ok(()),
            Actor::Chance => {
                for (mv, p) in node.chance_outcomes(config)? {
                    go(&node.apply(&mv, config)?, reach * p, key, profile, config, out)?;
                }
                Ok(())
            }
            Actor::Player(q) => {
                let actions = node.legal_actions(config)?;
                if q == key.player {
                    if &node.infoset_key(q, config) == key {
                        if out.action_values.is_empty() {
                            out.action_values = vec![0.0; actions.len()];
                        }
                        for (i, &a) in actions.iter().enumerate() {
                            let child = node.apply_action(a, config)?;
                            out.action_values[i] += reach * expected_utility(&child, q, profile, config)?;
                        }
                        out.value += reach * expected_utility(node, q, profile, config)?;
                        return Ok(());
                    }
                    if node.round() > key.round() {
                        return Ok(());
                    }
                    for a in actions {
                        go(&node.apply_action(a, config)?, reach, key, profile, config, out)?;
                    }
                    Ok(())
                } else {
                    let sigma = lookup(profile, &node.infoset_key(q, config), config)?;
                    for (a, s) in actions.into_iter().zip(sigma) {
                        if *s != 0.0 {
                            go(&node.apply_action(a, config)?, reach * s, key, profile, config, out)?;
                        }
                    }
                    Ok(())
                }
            }
        }
    }
    go(&HistoryNode::root(config), 1.0, key, profile, config, &mut out)?;
    if out.action_values.is_empty() {
        return Err(Error::Contract(format!("infoset {} is never reached", key.text(config))));
    }
    Ok(out)
}

/// |v^σ(I) − Σ_a σ(I,a) v^{σ|I→a}(I)| with both sides computed independently.
pub fn value_decomposition_residual(config: &GameConfig, profile: &StrategyTable, key: &InfoSetKey) -> Result<f64> {
    let cf = counterfactual_value(config, profile, key)?;
    let sigma = lookup(profile, key, config)?;
    let mixed: f64 = sigma.iter().zip(&cf.action_values).map(|(s, v)| s * v).sum();
    Ok((cf.value - mixed).abs())
}

/// [(a+b)_+]² ≤ (a_+)² + 2·a_+·b + b².
pub fn positive_part_square_bound(a: f64, b: f64) -> bool {
    let pos = |x: f64| x.max(0.0);
    let lhs = pos(a + b).powi(2);
    let rhs = pos(a).powi(2) + 2.0 * pos(a) * b + b * b;
    // equality holds when a, a + b > 0, so rounding scales with the terms, not their sum
    let scale = pos(a).powi(2) + (2.0 * pos(a) * b).abs() + b * b;
    lhs <= rhs + 1e-12 * scale.max(1.0)
}
