//! Hand ranking, suit canonicalization and exact strength outcome vectors.

pub mod canonical;
pub mod rank;
pub mod strength;

pub use canonical::{canonicalize, CanonicalHand};
pub use rank::{compare, rank_hand, Category, HandRank, Outcome};
pub use strength::{count_isomorphism_classes, terminal_outcome_vector, StrengthTable, StrengthTensor};
