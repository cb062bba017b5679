//! Infoset-keyed tables, the exchange format between solvers, evaluators and files.

use std::collections::HashMap;
use std::sync::Arc;

use super::table::{Layout, RowTable};
use crate::error::{Error, Result};
use crate::game::{Game, InfoSetKey};

/// Per-action numbers keyed by infoset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyedTable {
    pub entries: HashMap<InfoSetKey, Vec<f64>>,
}

/// σ(I, ·) per infoset.
pub type StrategyTable = KeyedTable;
/// R^T(I, ·) per infoset.
pub type RegretTable = KeyedTable;

impl KeyedTable {
    pub fn new() -> Self {
        KeyedTable::default()
    }

    pub fn get(&self, key: &InfoSetKey) -> Option<&[f64]> {
        self.entries.get(key).map(|v| v.as_slice())
    }

    pub fn insert(&mut self, key: InfoSetKey, values: Vec<f64>) {
        self.entries.insert(key, values);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One entry per (decision node, class) of a class-row table.
    pub fn from_rows(game: &Game, rows: &RowTable) -> Self {
        let mut out = KeyedTable::new();
        for &d in &game.tree.decisions {
            for c in 0..rows.layout.rows[d] {
                out.insert(game.infoset_key(d, c as u32), rows.row(d, c).to_vec());
            }
        }
        out
    }

    /// Back to class rows; every infoset of the game must be present.
    pub fn to_rows(&self, game: &Game) -> Result<RowTable> {
        let layout = Arc::new(Layout::classes(game));
        let mut out = RowTable::zeros(layout.clone());
        for &d in &game.tree.decisions {
            for c in 0..layout.rows[d] {
                let key = game.infoset_key(d, c as u32);
                let values = self
                    .get(&key)
                    .ok_or_else(|| Error::MissingInfoset(key.text(&game.config)))?;
                if values.len() != layout.actions[d] {
                    return Err(Error::Contract(format!(
                        "{} has {} actions, table gives {}",
                        key.text(&game.config),
                        layout.actions[d],
                        values.len()
                    )));
                }
                out.row_mut(d, c).copy_from_slice(values);
            }
        }
        Ok(out)
    }

    /// Entries sorted by canonical key text.
    pub fn sorted_text(&self, game: &Game) -> Vec<(String, Vec<f64>)> {
        let mut out: Vec<(String, Vec<f64>)> = self
            .entries
            .iter()
            .map(|(k, v)| (k.text(&game.config), v.clone()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}
