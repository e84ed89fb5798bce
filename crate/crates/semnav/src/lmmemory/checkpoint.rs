//! Binary checkpoint format for the landmark memory.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic   8 bytes  "SNLMEM1\n"
//! u32     n, m, dim
//! f32     alpha_unk
//! f32[dim*dim]      F, row-major
//! f32[dim*dim]      W, row-major
//! f32[n*m*dim]      raw descriptors, landmark-major
//! n entries:        u16 length + UTF-8 place id
//! ```
//!
//! Values are quantized to f32 on write; a file read back and rewritten is
//! byte-identical.

use ndarray::Array2;
use thiserror::Error;

use super::{build_memory, MemoryError, MemoryStore};
use crate::places::PlaceId;

const MAGIC: &[u8; 8] = b"SNLMEM1\n";
/// Guard against absurd allocations when reading untrusted bytes.
const MAX_ELEMENTS: u64 = 1 << 26;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("bad magic")]
    BadMagic,
    #[error("truncated checkpoint")]
    Truncated,
    #[error("unreasonable dimensions n={0} m={1} dim={2}")]
    BadDims(u32, u32, u32),
    #[error("non-finite float in checkpoint")]
    BadFloat,
    #[error("bad place id in value table: {0}")]
    BadPlace(String),
    #[error("trailing bytes after checkpoint")]
    TrailingBytes,
    #[error(transparent)]
    Memory(#[from] MemoryError),
}

/// Serialize the store (f32 quantization).
pub fn write_checkpoint(store: &MemoryStore) -> Vec<u8> {
    let dim = store.dim();
    let mut out = Vec::with_capacity(
        8 + 12 + 4 * (1 + 2 * dim * dim + store.n() * store.m() * dim) + 8 * store.n(),
    );
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(store.n() as u32).to_le_bytes());
    out.extend_from_slice(&(store.m() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    out.extend_from_slice(&(store.alpha_unk as f32).to_le_bytes());
    for &x in store.f().iter() {
        out.extend_from_slice(&(x as f32).to_le_bytes());
    }
    for &x in store.w().iter() {
        out.extend_from_slice(&(x as f32).to_le_bytes());
    }
    for &x in store.raw().iter() {
        out.extend_from_slice(&(x as f32).to_le_bytes());
    }
    for value in store.values() {
        let s = value.to_string();
        let bytes = s.as_bytes();
        out.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
        out.extend_from_slice(bytes);
    }
    out
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], CheckpointError> {
        if self.pos + len > self.data.len() {
            return Err(CheckpointError::Truncated);
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u16(&mut self) -> Result<u16, CheckpointError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f64, CheckpointError> {
        let v = f32::from_le_bytes(self.take(4)?.try_into().unwrap());
        if !v.is_finite() {
            return Err(CheckpointError::BadFloat);
        }
        Ok(v as f64)
    }
}

/// Parse a checkpoint back into a memory store (keys re-embedded from the
/// stored raw descriptors and `F`).
pub fn read_checkpoint(bytes: &[u8]) -> Result<MemoryStore, CheckpointError> {
    let mut r = Reader {
        data: bytes,
        pos: 0,
    };
    if r.take(8)? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let n = r.u32()?;
    let m = r.u32()?;
    let dim = r.u32()?;
    let elements = n as u64 * m as u64 * dim as u64;
    if n == 0
        || m == 0
        || dim == 0
        || elements > MAX_ELEMENTS
        || (dim as u64 * dim as u64) > MAX_ELEMENTS
    {
        return Err(CheckpointError::BadDims(n, m, dim));
    }
    let (n, m, dim) = (n as usize, m as usize, dim as usize);
    let alpha_unk = r.f32()?;

    let mut read_matrix = |rows: usize, cols: usize| -> Result<Array2<f64>, CheckpointError> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(r.f32()?);
        }
        Ok(Array2::from_shape_vec((rows, cols), data).unwrap())
    };
    let f = read_matrix(dim, dim)?;
    let w = read_matrix(dim, dim)?;
    let raw_flat = read_matrix(n * m, dim)?;

    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let len = r.u16()? as usize;
        let s = std::str::from_utf8(r.take(len)?)
            .map_err(|_| CheckpointError::BadPlace("not utf-8".into()))?;
        values.push(
            s.parse::<PlaceId>()
                .map_err(|_| CheckpointError::BadPlace(s.to_string()))?,
        );
    }
    if r.pos != bytes.len() {
        return Err(CheckpointError::TrailingBytes);
    }

    let raw: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| (0..m).map(|j| raw_flat.row(i * m + j).to_vec()).collect())
        .collect();
    Ok(build_memory(&raw, values, f, w, alpha_unk)?)
}

pub fn save_checkpoint(store: &MemoryStore, path: &std::path::Path) -> std::io::Result<()> {
    std::fs::write(path, write_checkpoint(store))
}

pub fn load_checkpoint(path: &std::path::Path) -> Result<MemoryStore, LoadError> {
    let bytes = std::fs::read(path)?;
    Ok(read_checkpoint(&bytes)?)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] CheckpointError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_store(seed: u64) -> MemoryStore {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<Vec<Vec<f64>>> = (0..5)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        v.into_iter().map(|x| x / norm).collect()
                    })
                    .collect()
            })
            .collect();
        let values: Vec<PlaceId> = (1..=5).map(PlaceId::Entrance).collect();
        let f = Array2::from_shape_fn((8, 8), |_| rng.gen_range(-1.0..1.0));
        let w = Array2::from_shape_fn((8, 8), |_| rng.gen_range(-1.0..1.0));
        build_memory(&raw, values, f, w, 0.25).unwrap()
    }

    #[test]
    fn file_round_trip_is_byte_identical() {
        let store = sample_store(3);
        let bytes = write_checkpoint(&store);
        let parsed = read_checkpoint(&bytes).unwrap();
        let rewritten = write_checkpoint(&parsed);
        assert_eq!(bytes, rewritten);
        assert_eq!(parsed.n(), store.n());
        assert_eq!(parsed.m(), store.m());
        assert_eq!(parsed.values(), store.values());
    }

    #[test]
    fn rejects_corruption() {
        let store = sample_store(4);
        let bytes = write_checkpoint(&store);
        assert!(matches!(
            read_checkpoint(&bytes[..bytes.len() - 1]),
            Err(CheckpointError::Truncated)
        ));
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(
            read_checkpoint(&bad_magic),
            Err(CheckpointError::BadMagic)
        ));
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(matches!(
            read_checkpoint(&trailing),
            Err(CheckpointError::TrailingBytes)
        ));
        // Absurd dims must be rejected before allocating.
        let mut huge = bytes.clone();
        huge[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(
            read_checkpoint(&huge),
            Err(CheckpointError::BadDims(..))
        ));
        assert!(read_checkpoint(b"").is_err());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = sample_store(5);
        let path = dir.path().join("memory.bin");
        save_checkpoint(&store, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(write_checkpoint(&loaded), write_checkpoint(&store));
    }
}
