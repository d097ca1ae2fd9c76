//! On-disk snapshot of a frozen store.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   8 bytes  b"DCHRSNP\0"
//! version u32      currently 1
//! digest  32 bytes SHA-256 of the payload
//! length  u64      payload byte count
//! payload          canonical JSON of the corpus
//! ```
//!
//! Loading a snapshot re-validates and re-indexes the embedded corpus, so a
//! snapshot-backed store is observation-equivalent to re-ingesting the
//! original corpus directory.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::store::{GraphStore, LoadError};

const MAGIC: &[u8; 8] = b"DCHRSNP\0";
const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("snapshot i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a snapshot file (bad magic)")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),
    #[error("snapshot payload digest mismatch")]
    DigestMismatch,
    #[error("snapshot payload truncated")]
    Truncated,
    #[error("snapshot payload is not a valid corpus: {0}")]
    Corrupt(#[from] serde_json::Error),
    #[error(transparent)]
    Load(#[from] LoadError),
}

pub fn write_snapshot(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
    let payload = serde_json::to_vec(corpus).expect("corpus serializes");
    let digest = Sha256::digest(&payload);
    let mut bytes = Vec::with_capacity(8 + 4 + 32 + 8 + payload.len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&digest);
    bytes.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&payload);
    fs::write(path.as_ref(), bytes).map_err(|source| SnapshotError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Corpus, SnapshotError> {
    let bytes = fs::read(path.as_ref()).map_err(|source| SnapshotError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    if bytes.len() < 8 + 4 + 32 + 8 {
        return Err(SnapshotError::Truncated);
    }
    if &bytes[..8] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    let digest = &bytes[12..44];
    let length = u64::from_le_bytes(bytes[44..52].try_into().unwrap()) as usize;
    let payload = bytes.get(52..52 + length).ok_or(SnapshotError::Truncated)?;
    if Sha256::digest(payload).as_slice() != digest {
        return Err(SnapshotError::DigestMismatch);
    }
    Ok(serde_json::from_slice(payload)?)
}

/// Read and index a snapshot in one step.
pub fn load_snapshot(path: impl AsRef<Path>) -> Result<GraphStore, SnapshotError> {
    Ok(GraphStore::load(read_snapshot(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_corpus_and_digest() {
        let corpus = Corpus { action_types: vec!["Creation".into()], ..Default::default() };
        let file = tempfile::NamedTempFile::new().unwrap();
        write_snapshot(&corpus, file.path()).unwrap();
        let restored = read_snapshot(file.path()).unwrap();
        assert_eq!(restored, corpus);
        let a = GraphStore::load(corpus).unwrap();
        let b = GraphStore::load(restored).unwrap();
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn tampered_payload_is_detected() {
        let file = tempfile::NamedTempFile::new().unwrap();
        write_snapshot(&Corpus::default(), file.path()).unwrap();
        let mut bytes = fs::read(file.path()).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0x01;
        fs::write(file.path(), bytes).unwrap();
        assert!(matches!(read_snapshot(file.path()), Err(SnapshotError::DigestMismatch)));
    }

    #[test]
    fn foreign_file_is_rejected() {
        let file = tempfile::NamedTempFile::new().unwrap();
        fs::write(file.path(), b"not a snapshot at all").unwrap();
        assert!(matches!(read_snapshot(file.path()), Err(SnapshotError::BadMagic)));
    }
}
