//! On-disk cache for modular data and per-level sweep checkpoints.
//!
//! Layout: one directory per (algebra, level) named `<spec>-k<level>`,
//! holding `manifest.json` — the algebra spec, level, labelling convention,
//! S-matrix normalization, the simple labels and their exact conformal
//! weights — and `s_rows.bin`, the S-matrix rows in label order as
//! little-endian `f64` (re, im) pairs. Sweep checkpoints live under
//! `sweep-<spec>/level-<k>.json`.
//!
//! All writes go to a process-unique temp file followed by an atomic rename,
//! so concurrent writers of identical content are safe (last write wins on
//! identical bytes) and readers never observe a torn file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::liealg::Rat;
use crate::modular::{self, ModularData};
use crate::weights::LevelContext;
use crate::{Error, Result};

/// Environment variable consulted when no cache directory flag is given.
pub const CACHE_ENV: &str = "ETALE_CACHE_DIR";

const CONVENTION: &str = "shifted";
const NORMALIZATION: &str = "unitary";

/// Handle to a cache directory. The directory is created lazily on first
/// write; a missing directory on read just means a cache miss.
#[derive(Debug, Clone)]
pub struct RowCache {
    dir: PathBuf,
}

/// JSON sidecar describing the binary row file.
#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    algebra: String,
    level: i64,
    convention: String,
    normalization: String,
    simples: Vec<Vec<i64>>,
    /// Conformal weights as exact (numerator, denominator) pairs.
    h: Vec<(i64, i64)>,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Write `bytes` atomically at `path` via a unique temp file and rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path
        .parent()
        .ok_or_else(|| Error::Msg(format!("cache path {} has no parent", path.display())))?;
    std::fs::create_dir_all(parent)?;
    let tmp = parent.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

impl RowCache {
    pub fn new(dir: impl Into<PathBuf>) -> RowCache {
        RowCache { dir: dir.into() }
    }

    /// Resolve a cache directory from an explicit flag, falling back to the
    /// `ETALE_CACHE_DIR` environment variable. `None` disables caching.
    pub fn resolve(flag: Option<&Path>) -> Option<RowCache> {
        match flag {
            Some(p) => Some(RowCache::new(p)),
            None => std::env::var_os(CACHE_ENV).map(RowCache::new),
        }
    }

    fn level_dir(&self, algebra: &str, level: i64) -> PathBuf {
        self.dir.join(format!("{algebra}-k{level}"))
    }

    /// Load the modular data for `ctx` if a complete, matching entry exists.
    /// Any missing file is a miss; a present-but-inconsistent entry is an
    /// error (the cache never silently serves wrong data).
    pub fn load(&self, ctx: &LevelContext) -> Result<Option<ModularData>> {
        let dir = self.level_dir(&ctx.alg.spec_string(), ctx.k);
        let manifest_path = dir.join("manifest.json");
        let rows_path = dir.join("s_rows.bin");
        if !manifest_path.exists() || !rows_path.exists() {
            return Ok(None);
        }
        let manifest: Manifest = serde_json::from_slice(&std::fs::read(&manifest_path)?)?;
        if manifest.algebra != ctx.alg.spec_string()
            || manifest.level != ctx.k
            || manifest.convention != CONVENTION
            || manifest.normalization != NORMALIZATION
        {
            return Err(Error::Msg(format!(
                "cache entry {} does not match the requested context",
                manifest_path.display()
            )));
        }
        let n = manifest.simples.len();
        if manifest.h.len() != n {
            return Err(Error::Msg(format!(
                "cache manifest {} is inconsistent",
                manifest_path.display()
            )));
        }
        let bytes = std::fs::read(&rows_path)?;
        if bytes.len() != n * n * 16 {
            return Err(Error::Msg(format!(
                "cache row file {} has {} bytes, expected {}",
                rows_path.display(),
                bytes.len(),
                n * n * 16
            )));
        }
        let mut s = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let off = (i * n + j) * 16;
                let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
                let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
                s[i][j] = Complex64::new(re, im);
            }
        }
        let index: BTreeMap<Vec<i64>, usize> = manifest
            .simples
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        if index.len() != n {
            return Err(Error::Msg(format!(
                "cache manifest {} repeats a label",
                manifest_path.display()
            )));
        }
        let h: Vec<Rat> = manifest.h.iter().map(|&(p, q)| Rat::new(p, q)).collect();
        Ok(Some(ModularData {
            ctx: ctx.clone(),
            simples: manifest.simples,
            index,
            s,
            h,
        }))
    }

    /// Store the modular data rows and sidecar manifest.
    pub fn store(&self, md: &ModularData) -> Result<()> {
        let dir = self.level_dir(&md.ctx.alg.spec_string(), md.ctx.k);
        let n = md.simples.len();
        let mut bytes = Vec::with_capacity(n * n * 16);
        for row in &md.s {
            for v in row {
                bytes.extend_from_slice(&v.re.to_le_bytes());
                bytes.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        write_atomic(&dir.join("s_rows.bin"), &bytes)?;
        let manifest = Manifest {
            algebra: md.ctx.alg.spec_string(),
            level: md.ctx.k,
            convention: CONVENTION.into(),
            normalization: NORMALIZATION.into(),
            simples: md.simples.clone(),
            h: md.h.iter().map(|r| (*r.numer(), *r.denom())).collect(),
        };
        write_atomic(
            &dir.join("manifest.json"),
            &serde_json::to_vec_pretty(&manifest)?,
        )?;
        Ok(())
    }

    /// Load a per-level sweep checkpoint, if present.
    pub fn load_checkpoint(&self, algebra: &str, level: i64) -> Result<Option<serde_json::Value>> {
        let path = self
            .dir
            .join(format!("sweep-{algebra}"))
            .join(format!("level-{level}.json"));
        if !path.exists() {
            return Ok(None);
        }
        Ok(Some(serde_json::from_slice(&std::fs::read(&path)?)?))
    }

    /// Store a per-level sweep checkpoint.
    pub fn store_checkpoint(
        &self,
        algebra: &str,
        level: i64,
        value: &serde_json::Value,
    ) -> Result<()> {
        let path = self
            .dir
            .join(format!("sweep-{algebra}"))
            .join(format!("level-{level}.json"));
        write_atomic(&path, &serde_json::to_vec(value)?)
    }
}

/// Compute the modular data for `ctx`, consulting and populating the cache
/// when one is configured.
pub fn modular_data_cached(
    cache: Option<&RowCache>,
    ctx: &LevelContext,
    budget: u128,
) -> Result<ModularData> {
    if let Some(c) = cache {
        if let Some(md) = c.load(ctx)? {
            return Ok(md);
        }
    }
    let md = modular::modular_data(ctx, budget)?;
    if let Some(c) = cache {
        c.store(&md)?;
    }
    Ok(md)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{algebra, Series};

    fn ctx(series: Series, rank: usize, k: i64) -> LevelContext {
        LevelContext::new(algebra(series, rank).unwrap(), k)
    }

    #[test]
    fn round_trip_preserves_modular_data() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RowCache::new(dir.path());
        let c = ctx(Series::A, 2, 5);
        let md = modular::modular_data(&c, 10_000).unwrap();
        cache.store(&md).unwrap();
        let back = cache.load(&c).unwrap().expect("cache hit");
        assert_eq!(back.simples, md.simples);
        assert_eq!(back.h, md.h);
        for (ra, rb) in md.s.iter().zip(&back.s) {
            for (a, b) in ra.iter().zip(rb) {
                assert_eq!(a, b, "bit-exact round trip");
            }
        }
    }

    #[test]
    fn miss_then_populate() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RowCache::new(dir.path());
        let c = ctx(Series::A, 1, 10);
        assert!(cache.load(&c).unwrap().is_none());
        let md = modular_data_cached(Some(&cache), &c, 10_000).unwrap();
        let again = modular_data_cached(Some(&cache), &c, 10_000).unwrap();
        assert_eq!(md.s, again.s);
        assert!(cache.load(&c).unwrap().is_some());
    }

    #[test]
    fn corrupt_row_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RowCache::new(dir.path());
        let c = ctx(Series::A, 1, 4);
        let md = modular::modular_data(&c, 10_000).unwrap();
        cache.store(&md).unwrap();
        let rows = dir.path().join("A1-k4").join("s_rows.bin");
        std::fs::write(&rows, b"short").unwrap();
        assert!(cache.load(&c).is_err());
    }

    #[test]
    fn checkpoints_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RowCache::new(dir.path());
        let v = serde_json::json!({"level": 7, "verdict": "no-exotic"});
        assert!(cache.load_checkpoint("A2", 7).unwrap().is_none());
        cache.store_checkpoint("A2", 7, &v).unwrap();
        assert_eq!(cache.load_checkpoint("A2", 7).unwrap(), Some(v));
    }
}
