//! On-disk cache of Cartier matrices in the `SZCM` format.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use suzuki_core::f2la::{read_szcm, write_szcm, CacheError};
use suzuki_core::BitMatrix;

pub fn cache_path(dir: &Path, m: u32) -> PathBuf {
    dir.join(format!("suzuki_m{m}.szcm"))
}

/// Writes `matrix` for curve `S_m` to `path`.
pub fn cache_matrix(path: &Path, m: u32, matrix: &BitMatrix) -> Result<(), CacheError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("szcm.tmp");
    write_szcm(BufWriter::new(File::create(&tmp)?), m, matrix)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a cached matrix; returns the curve index from the header with it.
pub fn load_matrix(path: &Path) -> Result<(u32, BitMatrix), CacheError> {
    read_szcm(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = cache_path(dir.path(), 1);
        let mut m = BitMatrix::zeros(14, 14);
        m.set(0, 1, true);
        m.set(13, 13, true);
        cache_matrix(&path, 1, &m).unwrap();
        assert_eq!(load_matrix(&path).unwrap(), (1, m));

        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(load_matrix(&path), Err(CacheError::ShortRead { .. })));

        let mut bad = bytes.clone();
        bad[9..13].copy_from_slice(&15u32.to_le_bytes());
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(
            load_matrix(&path),
            Err(CacheError::DimensionMismatch { g: 15, .. })
        ));

        assert!(matches!(
            load_matrix(&dir.path().join("missing")),
            Err(CacheError::Io(_))
        ));
    }
}
