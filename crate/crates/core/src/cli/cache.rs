//! On-disk cache of certified digits of `alpha(k)`.
//!
//! One text file per `(k, digits)`:
//!
//! ```text
//! k 3
//! digits 200
//! alpha 1.839286755...
//! sha256 <hex digest of the three lines above>
//! ```
//!
//! Loaded digits are re-certified before use; any mismatch falls back to
//! recomputation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::algebraic::{alpha_decimal, alpha_from_decimal, dominant_root, RootContext};
use crate::error::Result;
use crate::reduction::RootSource;

pub(crate) fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Writes through a temporary file and renames, so readers never see a
/// partial file.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheEvent {
    Hit,
    /// No record; computed and stored.
    Miss,
    /// Record failed its checksum or re-certification; recomputed.
    Recomputed,
}

#[derive(Clone, Debug)]
pub struct RootCache {
    dir: PathBuf,
}

impl RootCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        RootCache { dir: dir.into() }
    }

    pub fn path(&self, k: u32, digits: u32) -> PathBuf {
        self.dir.join(format!("alpha-k{k}-d{digits}.txt"))
    }

    fn record(k: u32, digits: u32, alpha: &str) -> String {
        let body = format!("k {k}\ndigits {digits}\nalpha {alpha}\n");
        let sum = sha256_hex(body.as_bytes());
        format!("{body}sha256 {sum}\n")
    }

    /// Computes `alpha(k)` to `digits` digits and stores it.
    pub fn cache_root_digits(&self, k: u32, digits: u32) -> Result<RootContext> {
        let ctx = dominant_root(k, digits)?;
        self.store(&ctx)?;
        Ok(ctx)
    }

    pub fn store(&self, ctx: &RootContext) -> Result<()> {
        let rec = Self::record(ctx.k, ctx.digits, &alpha_decimal(ctx));
        write_atomic(&self.path(ctx.k, ctx.digits), rec.as_bytes())
    }

    /// Stored digit string, if present and its checksum matches.
    pub fn load_digits(&self, k: u32, digits: u32) -> Option<String> {
        let text = fs::read_to_string(self.path(k, digits)).ok()?;
        let (body, sum) = text.rsplit_once("sha256 ")?;
        if sha256_hex(body.as_bytes()) != sum.trim_end() {
            log::warn!("cache record for k={k}, {digits} digits fails its checksum");
            return None;
        }
        let mut lines = body.lines();
        let want_k = format!("k {k}");
        let want_d = format!("digits {digits}");
        if lines.next()? != want_k || lines.next()? != want_d {
            return None;
        }
        lines.next()?.strip_prefix("alpha ").map(str::to_string)
    }

    /// Re-certified context from the cache, if the record is usable.
    pub fn load_cached(&self, k: u32, digits: u32) -> Option<RootContext> {
        let s = self.load_digits(k, digits)?;
        match alpha_from_decimal(k, digits, &s) {
            Ok(ctx) => Some(ctx),
            Err(e) => {
                log::warn!("cache record for k={k}, {digits} digits rejected: {e}");
                None
            }
        }
    }

    pub fn get(&self, k: u32, digits: u32) -> Result<(RootContext, CacheEvent)> {
        if let Some(ctx) = self.load_cached(k, digits) {
            return Ok((ctx, CacheEvent::Hit));
        }
        let event = if self.path(k, digits).exists() { CacheEvent::Recomputed } else { CacheEvent::Miss };
        Ok((self.cache_root_digits(k, digits)?, event))
    }

    /// A root source for the reduction campaigns backed by this cache.
    pub fn source(&self) -> RootSource {
        let cache = self.clone();
        RootSource::new(move |k, d| cache.get(k, d).map(|(ctx, _)| ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RootCache::new(dir.path());
        let (ctx, ev) = cache.get(3, 200).unwrap();
        assert_eq!(ev, CacheEvent::Miss);
        let stored = cache.load_digits(3, 200).unwrap();
        assert_eq!(stored, alpha_decimal(&ctx));
        let (again, ev) = cache.get(3, 200).unwrap();
        assert_eq!(ev, CacheEvent::Hit);
        assert_eq!(alpha_decimal(&again).len(), stored.len());
        assert!(again.alpha.width_raw() > num_bigint::BigInt::from(0));
    }

    #[test]
    fn tampered_record_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RootCache::new(dir.path());
        cache.cache_root_digits(4, 80).unwrap();
        let p = cache.path(4, 80);
        let text = fs::read_to_string(&p).unwrap();
        // change one digit of alpha, keep the old checksum
        let i = text.find("alpha 1.9").unwrap() + 12;
        let mut bytes = text.into_bytes();
        bytes[i] = if bytes[i] == b'5' { b'6' } else { b'5' };
        fs::write(&p, bytes).unwrap();
        assert!(cache.load_cached(4, 80).is_none());
        let (_, ev) = cache.get(4, 80).unwrap();
        assert_eq!(ev, CacheEvent::Recomputed);
        assert!(cache.load_cached(4, 80).is_some());
    }

    #[test]
    fn consistent_but_wrong_digits_fail_recertification() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RootCache::new(dir.path());
        let rec = RootCache::record(3, 40, "1.83928675521416113255185256465328660042417874609759");
        write_atomic(&cache.path(3, 40), rec.as_bytes()).unwrap();
        assert!(cache.load_cached(3, 40).is_some());
        let rec = RootCache::record(3, 40, "1.83928675521416113255285256465328660042417874609759");
        write_atomic(&cache.path(3, 40), rec.as_bytes()).unwrap();
        assert!(cache.load_cached(3, 40).is_none());
    }
}
