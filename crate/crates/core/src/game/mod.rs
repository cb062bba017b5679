//! Two-player limit poker engine: rules, histories, keys, dealing and the
//! compiled tables the solvers run on.

pub mod betting;
pub mod deals;
pub mod hands;
pub mod history;
pub mod tree;

use std::sync::Arc;

pub use betting::{Action, BettingState, BettingStatus};
pub use deals::{enumerate_deals, sample_deal, ChanceModel, Deal};
pub use hands::HandSpace;
pub use history::{infoblock_key, Actor, HistoryNode, InfoBlockKey, InfoSetKey, Move, Trace};
pub use tree::{BettingTree, NodeKind};

use crate::config::GameConfig;
use crate::error::Result;

/// A game compiled for solving: betting tree plus card tables.
#[derive(Debug)]
pub struct Game {
    pub config: GameConfig,
    pub tree: BettingTree,
    pub hands: HandSpace,
}

impl Game {
    pub fn new(config: GameConfig) -> Result<Arc<Game>> {
        config.validate()?;
        let tree = BettingTree::build(&config)?;
        let hands = HandSpace::build(&config);
        Ok(Arc::new(Game {
            config,
            tree,
            hands,
        }))
    }

    pub fn num_rounds(&self) -> usize {
        self.config.num_rounds()
    }

    /// Infoset classes for the player acting at decision node `node`.
    pub fn num_classes_at(&self, node: usize) -> usize {
        self.hands.num_classes(self.tree.nodes[node].round)
    }

    /// Key of the infoset formed by class `class` at decision node `node`.
    pub fn infoset_key(&self, node: usize, class: u32) -> InfoSetKey {
        let n = &self.tree.nodes[node];
        InfoSetKey {
            player: self.tree.player(node).expect("decision node"),
            hand: self.hands.class_hand(n.round, class).clone(),
            trace: n.trace.clone(),
        }
    }

    /// Maps a key back to its (decision node, class) pair.
    pub fn locate(&self, key: &InfoSetKey) -> Option<(usize, u32)> {
        let node = self.tree.node_of_block(&infoblock_key(key))?;
        let class = self.hands.class_of_hand(key.round(), &key.hand)?;
        Some((node, class))
    }
}
