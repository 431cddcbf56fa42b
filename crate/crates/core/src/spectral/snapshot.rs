//! Binary field snapshots.
//!
//! Layout (little endian): magic `EPLB`, `u32` version, three `u32` dims,
//! `f64` box length, `f64` time, `u8` representation (0 physical, 1 frequency),
//! `u8` real flag, then `re, im` pairs as `f64` in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{Representation, SpectralField};
use super::grid::Grid3;
use crate::error::{EpError, Result};

const MAGIC: &[u8; 4] = b"EPLB";
const VERSION: u32 = 1;

pub fn write_snapshot(path: &Path, field: &SpectralField, time: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let grid = field.grid();
    let n = grid.n() as u32;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for _ in 0..3 {
        w.write_all(&n.to_le_bytes())?;
    }
    w.write_all(&grid.box_length().to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    let repr = match field.representation() {
        Representation::Physical => 0u8,
        Representation::Frequency => 1u8,
    };
    w.write_all(&[repr, field.is_real() as u8])?;
    for v in field.data() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| EpError::Snapshot(format!("truncated header: {e}")))?;
    Ok(buf)
}

/// Returns the field and its stored time.
pub fn read_snapshot(path: &Path) -> Result<(SpectralField, f64)> {
    let mut r = BufReader::new(File::open(path)?);
    if &read_array::<4>(&mut r)? != MAGIC {
        return Err(EpError::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(EpError::Snapshot(format!("unsupported version {version}")));
    }
    let dims: Vec<u32> = (0..3)
        .map(|_| read_array::<4>(&mut r).map(u32::from_le_bytes))
        .collect::<Result<_>>()?;
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(EpError::Snapshot(format!("non-cubic dims {dims:?}")));
    }
    let box_length = f64::from_le_bytes(read_array(&mut r)?);
    let time = f64::from_le_bytes(read_array(&mut r)?);
    let [repr, real] = read_array::<2>(&mut r)?;
    let repr = match repr {
        0 => Representation::Physical,
        1 => Representation::Frequency,
        other => return Err(EpError::Snapshot(format!("bad representation tag {other}"))),
    };
    let grid = Grid3::new(dims[0] as usize, box_length)?;
    let mut bytes = vec![0u8; grid.len() * 16];
    r.read_exact(&mut bytes)
        .map_err(|e| EpError::Snapshot(format!("truncated data: {e}")))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(EpError::Snapshot("trailing bytes".into()));
    }
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let field = SpectralField::from_data(grid, data, repr, real != 0)?;
    Ok((field, time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let g = Grid3::new(8, 2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpectralField::random_real(g, 3, &mut rng);
        write_snapshot(&path, &f, 1.25).unwrap();
        let (back, t) = read_snapshot(&path).unwrap();
        assert_eq!(t, 1.25);
        assert_eq!(back.grid(), g);
        assert_eq!(back.representation(), f.representation());
        assert_eq!(back.is_real(), f.is_real());
        assert_eq!(back.data(), f.data());
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        std::fs::write(&path, b"NOPE0000").unwrap();
        assert!(matches!(read_snapshot(&path), Err(EpError::Snapshot(_))));
    }
}
