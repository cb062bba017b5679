//! The betting tree with card dealing factored out.
//!
//! Every decision node corresponds to exactly one info-block: the acting
//! player, the round and the public betting trace.

use super::betting::{Action, BettingState, BettingStatus};
use super::history::{InfoBlockKey, Trace};
use crate::config::GameConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Decision {
        player: usize,
        actions: Vec<Action>,
        children: Vec<usize>,
    },
    /// Community cards for `next_round` are dealt, then betting resumes at `child`.
    Chance { next_round: usize, child: usize },
    Fold { folder: usize, contrib: [i64; 2] },
    Showdown { contrib: [i64; 2] },
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub round: usize,
    pub trace: Trace,
    /// Position in `BettingTree::decisions` for decision nodes.
    pub decision: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct BettingTree {
    pub nodes: Vec<TreeNode>,
    /// Decision node ids in preorder.
    pub decisions: Vec<usize>,
    /// One past the last node of each node's subtree (ids are preorder).
    pub subtree_end: Vec<usize>,
}

impl BettingTree {
    pub fn build(config: &GameConfig) -> Result<Self> {
        let mut tree = BettingTree {
            nodes: Vec::new(),
            decisions: Vec::new(),
            subtree_end: Vec::new(),
        };
        tree.grow(&BettingState::new(config), Trace(vec![vec![]]), config)?;
        let mut end: Vec<usize> = (1..=tree.nodes.len()).collect();
        for id in (0..tree.nodes.len()).rev() {
            let last = match &tree.nodes[id].kind {
                NodeKind::Decision { children, .. } => children.last().copied(),
                NodeKind::Chance { child, .. } => Some(*child),
                _ => None,
            };
            if let Some(c) = last {
                end[id] = end[c];
            }
        }
        tree.subtree_end = end;
        Ok(tree)
    }

    fn grow(&mut self, state: &BettingState, trace: Trace, config: &GameConfig) -> Result<usize> {
        let id = self.nodes.len();
        let round = state.round;
        match state.status {
            BettingStatus::Folded { folder } => self.nodes.push(TreeNode {
                kind: NodeKind::Fold {
                    folder,
                    contrib: state.contrib,
                },
                round,
                trace,
                decision: None,
            }),
            BettingStatus::Showdown => self.nodes.push(TreeNode {
                kind: NodeKind::Showdown {
                    contrib: state.contrib,
                },
                round,
                trace,
                decision: None,
            }),
            BettingStatus::AwaitingCards => {
                self.nodes.push(TreeNode {
                    kind: NodeKind::Chance {
                        next_round: round + 1,
                        child: usize::MAX,
                    },
                    round,
                    trace: trace.clone(),
                    decision: None,
                });
                let mut next_trace = trace;
                next_trace.0.push(vec![]);
                let child = self.grow(&state.next_round()?, next_trace, config)?;
                if let NodeKind::Chance { child: c, .. } = &mut self.nodes[id].kind {
                    *c = child;
                }
            }
            BettingStatus::Acting => {
                let actions = state.legal_actions(config)?;
                self.nodes.push(TreeNode {
                    kind: NodeKind::Decision {
                        player: state.to_act,
                        actions: actions.clone(),
                        children: vec![],
                    },
                    round,
                    trace: trace.clone(),
                    decision: Some(self.decisions.len()),
                });
                self.decisions.push(id);
                let mut children = Vec::with_capacity(actions.len());
                for &a in &actions {
                    let mut t = trace.clone();
                    t.0.last_mut().expect("round").push(a);
                    children.push(self.grow(&state.apply(a, config)?, t, config)?);
                }
                if let NodeKind::Decision { children: c, .. } = &mut self.nodes[id].kind {
                    *c = children;
                }
            }
        }
        Ok(id)
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Whether `node` lies on the path from the root to `target` or below it.
    pub fn on_path_or_below(&self, node: usize, target: usize) -> bool {
        (node <= target && target < self.subtree_end[node]) || (target <= node && node < self.subtree_end[target])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn player(&self, node: usize) -> Option<usize> {
        match &self.nodes[node].kind {
            NodeKind::Decision { player, .. } => Some(*player),
            _ => None,
        }
    }

    pub fn actions(&self, node: usize) -> &[Action] {
        match &self.nodes[node].kind {
            NodeKind::Decision { actions, .. } => actions,
            _ => &[],
        }
    }

    pub fn num_actions(&self, node: usize) -> usize {
        self.actions(node).len()
    }

    pub fn block_key(&self, node: usize) -> Option<InfoBlockKey> {
        let n = &self.nodes[node];
        self.player(node).map(|player| InfoBlockKey {
            player,
            round: n.round,
            trace: n.trace.clone(),
        })
    }

    /// Finds the decision node for a block key.
    pub fn node_of_block(&self, key: &InfoBlockKey) -> Option<usize> {
        self.decisions.iter().copied().find(|&d| {
            let n = &self.nodes[d];
            n.trace == key.trace && self.player(d) == Some(key.player)
        })
    }

    /// Largest minus smallest terminal payoff, a bound on counterfactual value gaps.
    pub fn utility_range(&self) -> f64 {
        let mut lo = 0i64;
        let mut hi = 0i64;
        for n in &self.nodes {
            let stake = match n.kind {
                NodeKind::Fold { folder, contrib } => contrib[folder],
                NodeKind::Showdown { contrib } => contrib[0],
                _ => continue,
            };
            lo = lo.min(-stake);
            hi = hi.max(stake);
        }
        (hi - lo) as f64
    }
}
