//! Dense per-(decision node, row) tables.
//!
//! A row is an infoset class in the unabstracted game, or a bucket when a
//! [`RowMap`] merges classes.

use std::sync::Arc;

use crate::game::Game;

/// Where each decision node's rows live in a flat buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    /// First float of each node's block (unused for non-decision nodes).
    pub offset: Vec<usize>,
    /// First row slot of each node, for one-number-per-row side tables.
    pub slot: Vec<usize>,
    pub rows: Vec<usize>,
    pub actions: Vec<usize>,
    pub round: Vec<usize>,
    pub size: usize,
    pub slots: usize,
}

impl Layout {
    pub fn new(game: &Game, rows_per_round: &[usize]) -> Self {
        let tree = &game.tree;
        let n = tree.len();
        let mut layout = Layout {
            offset: vec![0; n],
            slot: vec![0; n],
            rows: vec![0; n],
            actions: vec![0; n],
            round: tree.nodes.iter().map(|node| node.round).collect(),
            size: 0,
            slots: 0,
        };
        for &d in &tree.decisions {
            let rows = rows_per_round[tree.nodes[d].round];
            let a = tree.num_actions(d);
            layout.offset[d] = layout.size;
            layout.slot[d] = layout.slots;
            layout.rows[d] = rows;
            layout.actions[d] = a;
            layout.size += rows * a;
            layout.slots += rows;
        }
        layout
    }

    /// One row per infoset class.
    pub fn classes(game: &Game) -> Self {
        let rows: Vec<usize> = (0..game.num_rounds()).map(|r| game.hands.num_classes(r)).collect();
        Layout::new(game, &rows)
    }

    pub fn range(&self, node: usize, row: usize) -> std::ops::Range<usize> {
        let a = self.actions[node];
        let start = self.offset[node] + row * a;
        start..start + a
    }
}

/// `rows × actions` floats per decision node.
#[derive(Clone, Debug, PartialEq)]
pub struct RowTable {
    pub layout: Arc<Layout>,
    pub data: Vec<f64>,
}

impl RowTable {
    pub fn zeros(layout: Arc<Layout>) -> Self {
        let data = vec![0.0; layout.size];
        RowTable { layout, data }
    }

    pub fn uniform(layout: Arc<Layout>) -> Self {
        let mut t = RowTable::zeros(layout);
        let layout = t.layout.clone();
        for (node, &a) in layout.actions.iter().enumerate() {
            if a > 0 {
                let start = layout.offset[node];
                t.data[start..start + layout.rows[node] * a].fill(1.0 / a as f64);
            }
        }
        t
    }

    pub fn row(&self, node: usize, row: usize) -> &[f64] {
        &self.data[self.layout.range(node, row)]
    }

    pub fn row_mut(&mut self, node: usize, row: usize) -> &mut [f64] {
        let r = self.layout.range(node, row);
        &mut self.data[r]
    }

    /// All rows of one node, row-major.
    pub fn block(&self, node: usize) -> &[f64] {
        let start = self.layout.offset[node];
        &self.data[start..start + self.layout.rows[node] * self.layout.actions[node]]
    }

    pub fn block_mut(&mut self, node: usize) -> &mut [f64] {
        let start = self.layout.offset[node];
        let end = start + self.layout.rows[node] * self.layout.actions[node];
        &mut self.data[start..end]
    }

    pub fn clear(&mut self) {
        self.data.fill(0.0);
    }
}

/// Class to row assignment per round; `None` keeps classes as rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RowMap {
    pub per_round: Vec<Option<Vec<u32>>>,
    pub rows: Vec<usize>,
}

impl RowMap {
    pub fn identity(game: &Game) -> Self {
        let rounds = game.num_rounds();
        RowMap {
            per_round: vec![None; rounds],
            rows: (0..rounds).map(|r| game.hands.num_classes(r)).collect(),
        }
    }

    pub fn row(&self, round: usize, class: u32) -> usize {
        match &self.per_round[round] {
            Some(map) => map[class as usize] as usize,
            None => class as usize,
        }
    }
}

/// Strategy lookup used by traversals.
pub trait Policy {
    fn strategy(&self, node: usize, class: u32) -> &[f64];
}

impl Policy for RowTable {
    fn strategy(&self, node: usize, class: u32) -> &[f64] {
        self.row(node, class as usize)
    }
}

/// A row table read through a class-to-row map.
pub struct Mapped<'a> {
    pub table: &'a RowTable,
    pub map: &'a RowMap,
}

impl Policy for Mapped<'_> {
    fn strategy(&self, node: usize, class: u32) -> &[f64] {
        let round = self.table.layout.round[node];
        self.table.row(node, self.map.row(round, class))
    }
}
