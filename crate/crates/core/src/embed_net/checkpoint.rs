//! "ECFRNET1": dims (suits, ranks, s, K, m) as u32, then the six weight arrays as f32.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::EmbeddingParams;
use crate::binio::{expect_magic, get_f32s, get_u32, put_f32s, put_u32};
use crate::error::{Error, Result};

pub const NET_MAGIC: &[u8; 8] = b"ECFRNET1";

pub fn write_params<W: Write>(w: &mut W, p: &EmbeddingParams<f32>) -> Result<()> {
    w.write_all(NET_MAGIC)?;
    for d in [p.suits, p.ranks, p.rounds, p.kernels, p.m] {
        put_u32(w, d as u32)?;
    }
    put_f32s(w, p.flat().into_iter())
}

pub fn read_params<R: Read>(r: &mut R) -> Result<EmbeddingParams<f32>> {
    expect_magic(r, NET_MAGIC)?;
    let mut dims = [0usize; 5];
    for d in dims.iter_mut() {
        *d = get_u32(r)? as usize;
    }
    let [suits, ranks, rounds, kernels, m] = dims;
    if suits == 0 || suits > 4 || ranks == 0 || ranks > 64 || rounds == 0 || kernels == 0 || m == 0 || m > 1 << 22 {
        return Err(Error::Checkpoint(format!("implausible network dims {dims:?}")));
    }
    let mut p = EmbeddingParams::<f32>::zeros(suits, ranks, rounds, kernels, m);
    let values = get_f32s(r, p.num_params())?;
    p.set_flat(&values)?;
    Ok(p)
}

pub fn save_params(path: &Path, p: &EmbeddingParams<f32>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_params(&mut w, p)?;
    w.flush()?;
    Ok(())
}

pub fn load_params(path: &Path) -> Result<EmbeddingParams<f32>> {
    if !path.exists() {
        return Err(Error::MissingArtifact {
            path: path.to_path_buf(),
            hint: "run `ecfr train-embedding` for this game first".into(),
        });
    }
    read_params(&mut BufReader::new(File::open(path)?))
}
