//! On-disk cache of the fully tabulated circuit landscape.
//!
//! The table is stored next to the config as `<stem>.table.bin`, keyed by a
//! SHA-256 over everything that determines the merits: the resolved axis
//! values, operating conditions, merit specification and the raw fixture
//! files. A key mismatch or unreadable file means the table is recomputed.
//!
//! Layout (little endian): magic, 32-byte key, axis count as u32, axis
//! lengths as u64, then four f64 per point (m_snr, m_bandwidth, m_phase,
//! global) in row-major order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use tiaopt_core::{MeritBreakdown, MeritTable};

use crate::config::LoadedConfig;

const MAGIC: &[u8; 16] = b"tiaopt-table-v1\n";

// Bump when the circuit model changes in a way that alters merits.
const MODEL_TAG: &str = "single-pole-tia/1";

pub type Key = [u8; 32];

pub fn cache_path(config_path: &Path) -> PathBuf {
    config_path.with_extension("table.bin")
}

pub fn landscape_key(cfg: &LoadedConfig) -> Result<Key> {
    let mut h = Sha256::new();
    h.update(MODEL_TAG.as_bytes());
    for part in [
        serde_json::to_vec(&cfg.space)?,
        serde_json::to_vec(&cfg.config.conditions)?,
        serde_json::to_vec(&cfg.config.merit)?,
    ] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(&part);
    }
    for text in [&cfg.photodiode_text, &cfg.opamp_text] {
        h.update((text.len() as u64).to_le_bytes());
        h.update(text.as_bytes());
    }
    Ok(h.finalize().into())
}

pub fn hex(key: &Key) -> String {
    key.iter().map(|b| format!("{b:02x}")).collect()
}

fn take<'a>(bytes: &mut &'a [u8], n: usize) -> Option<&'a [u8]> {
    if bytes.len() < n {
        return None;
    }
    let (head, tail) = bytes.split_at(n);
    *bytes = tail;
    Some(head)
}

fn take_u64(bytes: &mut &[u8]) -> Option<u64> {
    Some(u64::from_le_bytes(take(bytes, 8)?.try_into().ok()?))
}

fn take_f64(bytes: &mut &[u8]) -> Option<f64> {
    Some(f64::from_le_bytes(take(bytes, 8)?.try_into().ok()?))
}

/// Decodes a cache file, returning `None` unless it is well formed and
/// carries `key`.
pub fn decode(mut bytes: &[u8], key: &Key) -> Option<MeritTable<MeritBreakdown>> {
    let b = &mut bytes;
    if take(b, MAGIC.len())? != MAGIC || take(b, 32)? != key {
        return None;
    }
    let ndim = u32::from_le_bytes(take(b, 4)?.try_into().ok()?) as usize;
    let shape = (0..ndim)
        .map(|_| take_u64(b).map(|n| n as usize))
        .collect::<Option<Vec<_>>>()?;
    let count: usize = shape.iter().product();
    if b.len() != count * 32 {
        return None;
    }
    let merits = (0..count)
        .map(|_| {
            Some(MeritBreakdown {
                m_snr: take_f64(b)?,
                m_bandwidth: take_f64(b)?,
                m_phase: take_f64(b)?,
                global: take_f64(b)?,
            })
        })
        .collect::<Option<Vec<_>>>()?;
    MeritTable::from_vec(shape, merits).ok()
}

pub fn encode(table: &MeritTable<MeritBreakdown>, key: &Key, out: &mut impl Write) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(key)?;
    let shape = tiaopt_core::Landscape::shape(table);
    out.write_all(&(shape.len() as u32).to_le_bytes())?;
    for &n in shape {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    for m in table.merits() {
        for v in [m.m_snr, m.m_bandwidth, m.m_phase, m.global] {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load(path: &Path, key: &Key) -> Option<MeritTable<MeritBreakdown>> {
    decode(&fs::read(path).ok()?, key)
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written table.
pub fn store(path: &Path, key: &Key, table: &MeritTable<MeritBreakdown>) -> Result<()> {
    let tmp = path.with_extension(format!("bin.tmp{}", std::process::id()));
    let result = (|| -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        encode(table, key, &mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing table cache {}", path.display()))
}
