//! "ECFRTAB1" tables: count, then per entry key text, action count and values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::strategy::KeyedTable;
use crate::binio::{expect_magic, get_f64s, get_str, get_u32, get_u64, put_f64s, put_str, put_u32, put_u64};
use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::game::{Game, InfoSetKey};

pub const TABLE_MAGIC: &[u8; 8] = b"ECFRTAB1";

pub fn write_entries<W: Write>(w: &mut W, entries: &[(String, Vec<f64>)]) -> Result<()> {
    w.write_all(TABLE_MAGIC)?;
    put_u64(w, entries.len() as u64)?;
    for (key, values) in entries {
        put_str(w, key)?;
        put_u32(w, values.len() as u32)?;
        put_f64s(w, values)?;
    }
    Ok(())
}

pub fn read_entries<R: Read>(r: &mut R) -> Result<Vec<(String, Vec<f64>)>> {
    expect_magic(r, TABLE_MAGIC)?;
    let count = get_u64(r)?;
    let mut out = Vec::new();
    for _ in 0..count {
        let key = get_str(r)?;
        let n = get_u32(r)? as usize;
        if n > 64 {
            return Err(Error::Checkpoint(format!("{key}: implausible action count {n}")));
        }
        out.push((key, get_f64s(r, n)?));
    }
    Ok(out)
}

/// Writes a keyed table sorted by key text, so equal tables give equal bytes.
pub fn save_table(path: &Path, game: &Game, table: &KeyedTable) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_entries(&mut w, &table.sorted_text(game))?;
    w.flush()?;
    Ok(())
}

pub fn load_table(path: &Path, config: &GameConfig) -> Result<KeyedTable> {
    let mut r = BufReader::new(File::open(path)?);
    let mut out = KeyedTable::new();
    for (key, values) in read_entries(&mut r)? {
        out.insert(InfoSetKey::parse(&key, config)?, values);
    }
    Ok(out)
}
