//! Binary cache for tau tables: `"TAU1"`, `u64` length, then that many
//! little-endian `i128` values.

use crate::{Error, Result};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"TAU1";

pub(super) fn write(path: &Path, values: &[i128]) -> Result<()> {
    let tmp = path.with_extension("partial");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(MAGIC)?;
        w.write_all(&(values.len() as u64).to_le_bytes())?;
        for v in values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub(super) fn read(path: &Path) -> Result<Vec<i128>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("bad magic {magic:?}")));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len == 0 || len > super::tau::TAU_MAX {
        return Err(Error::Cache(format!("implausible length {len}")));
    }
    let mut bytes = vec![0u8; len * 16];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::Cache("truncated payload".into()))?;
    let values: Vec<i128> = bytes
        .chunks_exact(16)
        .map(|c| i128::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if values[0] != 1 {
        return Err(Error::Cache("tau(1) != 1".into()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("tau-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.bin");
        write(&path, &[1, -24, 252]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"TAU1");
        assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 3);
        assert_eq!(bytes.len(), 12 + 3 * 16);
        assert_eq!(
            i128::from_le_bytes(bytes[28..44].try_into().unwrap()),
            -24
        );
        assert_eq!(read(&path).unwrap(), vec![1, -24, 252]);

        std::fs::write(&path, b"TAU2\x01\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(read(&path), Err(Error::Cache(_))));
        std::fs::write(&path, &bytes[..30]).unwrap();
        assert!(matches!(read(&path), Err(Error::Cache(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
