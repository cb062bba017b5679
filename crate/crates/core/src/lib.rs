//! Counterfactual regret minimization for limit poker games, in the original
//! infoset space and in a learned low-dimensional advisor space.
//!
//! * [`game`]: rules, histories, infoset and info-block keys, dealing
//! * [`hand_strength`]: ranking, suit isomorphism, strength outcome vectors
//! * [`embed_net`]: the hand embedding network producing advisor coordinates
//! * [`solver`]: tabular CFR and the counterfactual-value machinery
//! * [`embedding_cfr`]: regret accumulation and strategy recovery in advisor space
//! * [`abstraction`]: EHS k-means bucketing and bucketed CFR
//! * [`best_response`]: exact best responses and exploitability
//! * [`harness`]: the experiment commands behind the CLI

pub mod abstraction;
pub mod best_response;
mod binio;
pub mod cards;
pub mod config;
pub mod embed_net;
pub mod embedding_cfr;
pub mod error;
pub mod game;
pub mod hand_strength;
pub mod harness;
pub mod solver;

pub use cards::Card;
pub use config::GameConfig;
pub use error::{Error, Result};
pub use game::Game;
