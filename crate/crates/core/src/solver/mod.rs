//! Tabular CFR and the counterfactual-value machinery shared by every solver.

pub mod cfr;
pub mod checkpoint;
pub mod reference;
pub mod strategy;
pub mod table;
pub mod traverse;

pub use cfr::{expand, normalize_or_uniform, regret_matching, regret_matching_vec, ClassStats, TabularCfr};
pub use reference::{counterfactual_value, expected_utility, positive_part_square_bound, value_decomposition_residual, CfValues};
pub use strategy::{KeyedTable, RegretTable, StrategyTable};
pub use table::{Layout, Mapped, Policy, RowMap, RowTable};
pub use traverse::{traverse, traverse_focused, Chance, DealSample, NoRecord, Recorder, Visit};
