//! "ECFRADV1": block count, then per block the key text, n, m, |A|, T and the
//! regret, strategy and average matrices (`m × |A|` f64, row-major).
//!
//! Only advisor blocks are written here. The tabular rounds go to a pair of
//! ordinary table checkpoints next to it.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{AdvisorBlock, EmbeddingCfr};
use crate::binio::{expect_magic, get_f64s, get_str, get_u32, get_u64, put_f64s, put_str, put_u32, put_u64};
use crate::error::{Error, Result};
use crate::solver::checkpoint::{read_entries, write_entries};
use crate::solver::RowTable;

pub const ADVISOR_MAGIC: &[u8; 8] = b"ECFRADV1";

pub const ADVISOR_FILE: &str = "advisors.bin";
pub const TABULAR_REGRET_FILE: &str = "tabular_regret.bin";
pub const TABULAR_AVERAGE_FILE: &str = "tabular_average.bin";

pub fn write_blocks<W: Write>(w: &mut W, blocks: &[AdvisorBlock]) -> Result<()> {
    w.write_all(ADVISOR_MAGIC)?;
    put_u32(w, blocks.len() as u32)?;
    for b in blocks {
        put_str(w, &b.key.to_string())?;
        put_u32(w, b.n as u32)?;
        put_u32(w, b.advisors() as u32)?;
        put_u32(w, b.actions() as u32)?;
        put_u64(w, b.iteration)?;
        for m in [&b.regret, &b.strategy, &b.average] {
            put_f64s(w, m.as_standard_layout().as_slice().expect("contiguous"))?;
        }
    }
    Ok(())
}

/// A block as read from disk, before it is matched to a tree node.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredBlock {
    pub key: String,
    pub n: usize,
    pub iteration: u64,
    pub regret: Array2<f64>,
    pub strategy: Array2<f64>,
    pub average: Array2<f64>,
}

pub fn read_blocks<R: Read>(r: &mut R) -> Result<Vec<StoredBlock>> {
    expect_magic(r, ADVISOR_MAGIC)?;
    let count = get_u32(r)? as usize;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let key = get_str(r)?;
        let n = get_u32(r)? as usize;
        let m = get_u32(r)? as usize;
        let a = get_u32(r)? as usize;
        if m == 0 || a == 0 || a > 64 || m > 1 << 24 {
            return Err(Error::Checkpoint(format!("block {key}: implausible shape {m}x{a}")));
        }
        let iteration = get_u64(r)?;
        let mut mats = Vec::with_capacity(3);
        for _ in 0..3 {
            let v = get_f64s(r, m * a)?;
            mats.push(Array2::from_shape_vec((m, a), v).expect("length checked"));
        }
        let average = mats.pop().expect("three");
        let strategy = mats.pop().expect("three");
        let regret = mats.pop().expect("three");
        out.push(StoredBlock {
            key,
            n,
            iteration,
            regret,
            strategy,
            average,
        });
    }
    Ok(out)
}

fn rows_to_entries(solver: &EmbeddingCfr, table: &RowTable) -> Vec<(String, Vec<f64>)> {
    let game = solver.game();
    let layout = &table.layout;
    let mut entries = Vec::new();
    for &d in &game.tree.decisions {
        for c in 0..layout.rows[d] {
            let key = game.infoset_key(d, c as u32).text(&game.config);
            entries.push((key, table.row(d, c).to_vec()));
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

fn entries_to_rows(solver: &EmbeddingCfr, template: &RowTable, entries: Vec<(String, Vec<f64>)>) -> Result<RowTable> {
    let game = solver.game();
    let mut out = RowTable::zeros(template.layout.clone());
    let mut seen = 0usize;
    for (text, values) in entries {
        let key = crate::game::InfoSetKey::parse(&text, &game.config)?;
        let Some((node, class)) = game.locate(&key) else {
            return Err(Error::Checkpoint(format!("unknown infoset {text}")));
        };
        if class as usize >= out.layout.rows[node] || values.len() != out.layout.actions[node] {
            return Err(Error::Checkpoint(format!("infoset {text} does not belong to a tabular round")));
        }
        out.row_mut(node, class as usize).copy_from_slice(&values);
        seen += 1;
    }
    if seen != out.layout.slots {
        return Err(Error::Checkpoint(format!("{seen} tabular rows for {} expected", out.layout.slots)));
    }
    Ok(out)
}

impl EmbeddingCfr {
    /// Writes the advisor file and the two tabular files into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join(ADVISOR_FILE))?);
        write_blocks(&mut w, &self.blocks())?;
        w.flush()?;
        let (regret, average) = self.tabular_state();
        for (name, table) in [(TABULAR_REGRET_FILE, regret), (TABULAR_AVERAGE_FILE, average)] {
            let mut w = BufWriter::new(File::create(dir.join(name))?);
            write_entries(&mut w, &rows_to_entries(self, table))?;
            w.flush()?;
        }
        Ok(())
    }

    /// Restores state written by [`EmbeddingCfr::save`] into a solver built
    /// with the same game, provider and config.
    pub fn load(&mut self, dir: &Path) -> Result<()> {
        let path = dir.join(ADVISOR_FILE);
        if !path.exists() {
            return Err(Error::MissingArtifact {
                path,
                hint: "run `ecfr solve --solver embedding` first".into(),
            });
        }
        let stored = read_blocks(&mut BufReader::new(File::open(&path)?))?;
        let mut blocks = self.blocks();
        if stored.len() != blocks.len() {
            return Err(Error::Checkpoint(format!("{} blocks stored, {} expected", stored.len(), blocks.len())));
        }
        let mut iteration = None;
        for (b, s) in blocks.iter_mut().zip(stored) {
            if b.key.to_string() != s.key || b.n != s.n {
                return Err(Error::Checkpoint(format!("block {} stored where {} was expected", s.key, b.key)));
            }
            if *iteration.get_or_insert(s.iteration) != s.iteration {
                return Err(Error::Checkpoint("blocks disagree on the iteration count".into()));
            }
            b.regret = s.regret;
            b.strategy = s.strategy;
            b.average = s.average;
            self.set_block(b).map_err(|e| Error::Checkpoint(e.to_string()))?;
        }
        let (regret_t, average_t) = self.tabular_state();
        let (regret_t, average_t) = (regret_t.clone(), average_t.clone());
        let mut tables = Vec::new();
        for (name, template) in [(TABULAR_REGRET_FILE, &regret_t), (TABULAR_AVERAGE_FILE, &average_t)] {
            let entries = read_entries(&mut BufReader::new(File::open(dir.join(name))?))?;
            tables.push(entries_to_rows(self, template, entries)?);
        }
        let average = tables.pop().expect("two");
        let regret = tables.pop().expect("two");
        self.set_tabular_state(regret, average, iteration.unwrap_or(0))
    }
}
