//! Content-addressed on-disk store of assembled operators.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use faddeev_core::boundary_ops::BoundaryOperator;
use faddeev_core::geometry::NodeSet;
use faddeev_core::C64;
use serde::Serialize;

use crate::container;
use crate::error::{EpError, EpResult};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "FADDEEV_EP_CACHE";

/// Identity of a cached operator. `curve` and `potential` are lossless
/// textual descriptions; the file name is the SHA-256 of the whole key.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheKey {
    pub curve: String,
    pub n: usize,
    pub k: Option<C64>,
    pub kind: &'static str,
    pub potential: String,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let k =
            self.k.map_or_else(|| "none".to_string(), |k| format!("{:016x}:{:016x}", k.re.to_bits(), k.im.to_bits()));
        let text = format!(
            "faddeev-ep {}\ncurve={}\nn={}\nk={}\nkind={}\npotential={}",
            env!("CARGO_PKG_VERSION"),
            self.curve,
            self.n,
            k,
            self.kind,
            self.potential
        );
        container::sha256_hex(text.as_bytes())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub evictions: usize,
}

#[derive(Debug, Default)]
pub struct OperatorCache {
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    evictions: AtomicUsize,
}

impl OperatorCache {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn open(dir: impl Into<PathBuf>) -> EpResult<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| EpError::io(&dir, e))?;
        Ok(Self { dir: Some(dir), ..Self::default() })
    }

    /// Cache directory: explicit setting, then `FADDEEV_EP_CACHE`, then
    /// `$XDG_CACHE_HOME/faddeev-ep` or `~/.cache/faddeev-ep`.
    pub fn resolve_dir(explicit: Option<&Path>) -> PathBuf {
        if let Some(d) = explicit {
            return d.to_path_buf();
        }
        if let Some(d) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(d);
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
            return PathBuf::from(d).join("faddeev-ep");
        }
        match std::env::var_os("HOME") {
            Some(h) => PathBuf::from(h).join(".cache").join("faddeev-ep"),
            None => std::env::temp_dir().join("faddeev-ep-cache"),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            evictions: self.evictions.load(Ordering::Relaxed),
        }
    }

    pub fn path_for(&self, key: &CacheKey) -> Option<PathBuf> {
        let digest = key.digest();
        self.dir.as_ref().map(|d| d.join(&digest[..2]).join(format!("{digest}.fep")))
    }

    /// Stored operator for `key`, or the result of `build` (then stored).
    /// Entries with a bad checksum or a mismatched header are evicted.
    pub fn get_or_build<E>(
        &self,
        key: &CacheKey,
        nodes: &Arc<NodeSet>,
        build: impl FnOnce() -> Result<BoundaryOperator, E>,
    ) -> EpResult<BoundaryOperator>
    where
        EpError: From<E>,
    {
        let Some(path) = self.path_for(key) else {
            return Ok(build()?);
        };
        if path.exists() {
            match self.load(&path, key, nodes) {
                Ok(op) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(op);
                }
                Err(msg) => {
                    log::warn!("evicting cache entry {}: {msg}", path.display());
                    self.evictions.fetch_add(1, Ordering::Relaxed);
                    let _ = std::fs::remove_file(&path);
                }
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let op = build()?;
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| EpError::io(parent, e))?;
        }
        if let Err(e) = container::write(&path, container::operator_header(&op, key.kind, key.k), &op.matrix) {
            // a read-only cache is not fatal
            log::warn!("cannot store cache entry: {e}");
        }
        Ok(op)
    }

    fn load(&self, path: &Path, key: &CacheKey, nodes: &Arc<NodeSet>) -> Result<BoundaryOperator, String> {
        let (h, m) = container::read(path).map_err(|e| e.to_string())?;
        let k_ok = h.k == key.k.map(|k| (k.re, k.im));
        if h.kind != key.kind || h.n != key.n || h.rows != nodes.len() || h.cols != nodes.len() || !k_ok {
            return Err("header does not match the key".into());
        }
        let (Some(domain), Some(range)) = (container::parse_space(&h.domain), container::parse_space(&h.range)) else {
            return Err("unknown space tag".into());
        };
        BoundaryOperator::new(m, domain, range, nodes.clone()).map_err(|e| e.to_string())
    }
}
