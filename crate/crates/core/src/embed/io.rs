//! Model files.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! "GPEM"  u32 version  u32 dim  u32 vocab_size
//! per word: u32 byte_len, UTF-8 bytes, u64 count,
//!           dim × f32 target row, dim × f32 context row
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbedError, EmbeddingModel, MatrixRole, Vocabulary};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 4] = b"GPEM";
pub const VERSION: u32 = 1;
const MAX_WORD_BYTES: u32 = 1 << 16;

pub fn write_model<F: Scalar, W: Write>(model: &EmbeddingModel<F>, mut w: W) -> Result<(), EmbedError> {
    let too_big = |what: &str| EmbedError::Format(format!("{what} exceeds u32"));
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&u32::try_from(model.dim()).map_err(|_| too_big("dim"))?.to_le_bytes())?;
    w.write_all(
        &u32::try_from(model.len())
            .map_err(|_| too_big("vocabulary"))?
            .to_le_bytes(),
    )?;
    for (i, (word, count)) in model.vocab().iter().enumerate() {
        let bytes = word.as_bytes();
        w.write_all(&u32::try_from(bytes.len()).map_err(|_| too_big("word"))?.to_le_bytes())?;
        w.write_all(bytes)?;
        w.write_all(&count.to_le_bytes())?;
        for m in [model.target(), model.context()] {
            for &x in m.row(i) {
                let x = x.to_f32().unwrap_or(f32::NAN);
                w.write_all(&x.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32, EmbedError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads a model; `slice_id` and `seed` are not stored and come back empty.
pub fn read_model<F: Scalar, R: Read>(mut r: R) -> Result<EmbeddingModel<F>, EmbedError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(EmbedError::Format("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(EmbedError::Format(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    if dim == 0 {
        return Err(EmbedError::Format("dimension is zero".into()));
    }
    let mut pairs = Vec::with_capacity(n.min(1 << 20));
    let mut target = Vec::with_capacity((n * dim).min(1 << 24));
    let mut context = Vec::with_capacity((n * dim).min(1 << 24));
    let mut row = vec![0u8; 4 * dim];
    for _ in 0..n {
        let len = read_u32(&mut r)?;
        if len > MAX_WORD_BYTES {
            return Err(EmbedError::Format(format!("word of {len} bytes")));
        }
        let mut bytes = vec![0u8; len as usize];
        r.read_exact(&mut bytes)?;
        let word = String::from_utf8(bytes).map_err(|_| EmbedError::Format("word is not UTF-8".into()))?;
        let mut c = [0u8; 8];
        r.read_exact(&mut c)?;
        pairs.push((word, u64::from_le_bytes(c)));
        for dest in [&mut target, &mut context] {
            r.read_exact(&mut row)?;
            dest.extend(
                row.chunks_exact(4)
                    .map(|b| F::of(f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)),
            );
        }
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(EmbedError::Format("trailing bytes after last word".into()));
    }
    let vocab = Vocabulary::from_ordered(pairs).map_err(EmbedError::Format)?;
    EmbeddingModel::new(
        vocab,
        Matrix::from_vec(n, dim, target),
        Matrix::from_vec(n, dim, context),
        "",
        0,
    )
}

pub fn save_model<F: Scalar>(model: &EmbeddingModel<F>, path: impl AsRef<Path>) -> Result<(), EmbedError> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model<F: Scalar>(path: impl AsRef<Path>) -> Result<EmbeddingModel<F>, EmbedError> {
    read_model(BufReader::new(File::open(path)?))
}

/// One line per word: the word, then its vector, space separated.
pub fn write_text<F: Scalar, W: Write>(
    model: &EmbeddingModel<F>,
    role: MatrixRole,
    mut w: W,
) -> Result<(), EmbedError> {
    let m = model.matrix(role);
    for (i, word) in model.vocab().words().iter().enumerate() {
        w.write_all(word.as_bytes())?;
        for x in m.row(i) {
            write!(w, " {x}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
