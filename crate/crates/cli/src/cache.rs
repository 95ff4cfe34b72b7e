// Copyright 2026 The distill Authors
// SPDX-License-Identifier: Apache-2.0

//! On-disk store for intermediate Fock states.
//!
//! File layout, all integers little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `DSTLRHO\0` |
//! | 4 | format version |
//! | 4 | cutoff `c` |
//! | 32 | SHA-256 of the producing configuration fingerprint |
//! | 16 (c+1)² | row-major `(re, im)` pairs of `f64` |
//! | 32 | SHA-256 of everything above |
//!
//! Any mismatch (truncated file, wrong version, foreign key, bad checksum)
//! is a miss. Files are written to a temporary name and renamed, so readers
//! never see partial entries.

use std::path::{Path, PathBuf};

use distill_core::iterative::StateCache;
use distill_core::FockDensityMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

pub const MAGIC: &[u8; 8] = b"DSTLRHO\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER: usize = 8 + 4 + 4 + 32;

pub struct DiskCache {
    dir: PathBuf,
}

fn key_digest(key: &str) -> [u8; 32] {
    Sha256::digest(key.as_bytes()).into()
}

pub fn encode(key: &str, rho: &FockDensityMatrix) -> Vec<u8> {
    let d = rho.dim();
    let mut buf = Vec::with_capacity(HEADER + 16 * d * d + 32);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(rho.cutoff() as u32).to_le_bytes());
    buf.extend_from_slice(&key_digest(key));
    for m in 0..d {
        for n in 0..d {
            let z = rho.get(m, n);
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let sum = Sha256::digest(&buf);
    buf.extend_from_slice(&sum);
    buf
}

pub fn decode(key: &str, bytes: &[u8]) -> Option<FockDensityMatrix> {
    if bytes.len() < HEADER + 32 || &bytes[..8] != MAGIC {
        return None;
    }
    let (body, sum) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != sum {
        return None;
    }
    let version = u32::from_le_bytes(body[8..12].try_into().ok()?);
    let cutoff = u32::from_le_bytes(body[12..16].try_into().ok()?) as usize;
    if version != FORMAT_VERSION || body[16..48] != key_digest(key) {
        return None;
    }
    let d = cutoff + 1;
    let payload = &body[HEADER..];
    if payload.len() != 16 * d * d {
        return None;
    }
    let f = |i: usize| f64::from_le_bytes(payload[8 * i..8 * i + 8].try_into().unwrap());
    let elements = DMatrix::from_fn(d, d, |m, n| {
        let i = 2 * (m * d + n);
        Complex64::new(f(i), f(i + 1))
    });
    FockDensityMatrix::new(elements, "cached").ok()
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.rho", hex::encode(key_digest(key))))
    }
}

impl StateCache for DiskCache {
    fn get(&self, key: &str) -> Option<FockDensityMatrix> {
        let path = self.path(key);
        let bytes = std::fs::read(&path).ok()?;
        match decode(key, &bytes) {
            Some(rho) => {
                log::info!("cache hit: {}", path.display());
                Some(rho)
            }
            None => {
                log::warn!("ignoring unreadable cache entry {}", path.display());
                None
            }
        }
    }

    fn put(&self, key: &str, rho: &FockDensityMatrix) {
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let result = std::fs::write(&tmp, encode(key, rho)).and_then(|_| std::fs::rename(&tmp, &path));
        if let Err(e) = result {
            // a failed write only costs a recomputation later
            log::warn!("could not write cache entry {}: {e}", path.display());
            let _ = std::fs::remove_file(&tmp);
        }
    }
}
