use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use walklab_core::convolution::{convolve, read_power, write_power, CacheHeader};
use walklab_core::{Error, FiniteMeasure, Result, ReturnSeries};

/// Content-addressed store under `root/<key[..2]>/<key>.<ext>`.
///
/// Keys are SHA-256 digests of `(group, measure, ε, n)` plus a tag naming
/// what is stored. Every write goes to a temporary file in the target
/// directory and is renamed into place.
#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

/// Digest of the fields that determine a cached object.
pub fn cache_key(tag: &str, group: &str, measure: &str, epsilon: f64, n: u64) -> String {
    let text = format!("{tag}\ngroup={group}\nmeasure={measure}\nepsilon={epsilon:e}\nn={n}\n");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Resource(format!("cache I/O on {}: {e}; point `cache` at a writable directory", path.display()))
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, key: &str, ext: &str) -> PathBuf {
        self.root.join(&key[..2]).join(format!("{key}.{ext}"))
    }

    /// A stored series, or `None` when absent or unreadable.
    pub fn load_series(&self, key: &str) -> Option<ReturnSeries> {
        let text = fs::read_to_string(self.path(key, "json")).ok()?;
        match serde_json::from_str(&text) {
            Ok(s) => Some(s),
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {key}: {e}");
                None
            }
        }
    }

    pub fn store_series(&self, key: &str, series: &ReturnSeries) -> Result<()> {
        let text = serde_json::to_string(series).map_err(|e| Error::Numeric(format!("serializing a series: {e}")))?;
        atomic_write(&self.path(key, "json"), text.as_bytes())
    }

    /// The series under `key`, computing and storing it on a miss. The flag
    /// says whether the cache supplied it.
    pub fn series_or(&self, key: &str, compute: impl FnOnce() -> Result<ReturnSeries>) -> Result<(ReturnSeries, bool)> {
        if let Some(s) = self.load_series(key) {
            return Ok((s, true));
        }
        let s = compute()?;
        self.store_series(key, &s)?;
        Ok((s, false))
    }

    /// `φ^{(n)}` with atoms below `eps` dropped, by binary powering. Stored
    /// and reused under `(group, measure, eps, n)`.
    pub fn power(&self, group: &str, measure: &str, phi: &FiniteMeasure, n: u64, eps: f64) -> Result<(FiniteMeasure, bool)> {
        let key = cache_key("power", group, measure, eps, n);
        let path = self.path(&key, "csv");
        if let Ok((header, mu)) = read_power(&path) {
            if header.group == group && header.measure == measure && header.n == n && header.epsilon == eps {
                return Ok((mu, true));
            }
            log::warn!("cache entry {key} does not match its key; recomputing");
        }
        let mu = power(phi, n, eps)?;
        let header = CacheHeader {
            group: group.to_string(),
            measure: measure.to_string(),
            n,
            epsilon: eps,
            deficit: mu.deficit(),
        };
        fs::create_dir_all(path.parent().expect("keyed paths have a parent")).map_err(|e| io_error(&path, e))?;
        write_power(&path, &header, &mu)?;
        Ok((mu, false))
    }
}

/// `φ^{(n)}` by repeated squaring.
pub fn power(phi: &FiniteMeasure, n: u64, eps: f64) -> Result<FiniteMeasure> {
    let mut result = FiniteMeasure::delta(phi.kind(), phi.kind().identity())?;
    let mut base = phi.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = convolve(&result, &base, eps)?;
        }
        k >>= 1;
        if k > 0 {
            base = convolve(&base, &base, eps)?;
        }
    }
    Ok(result)
}

/// Largest weight difference between two measures on the same group.
pub fn max_difference(a: &FiniteMeasure, b: &FiniteMeasure) -> f64 {
    let mut worst: f64 = 0.0;
    for (g, w) in a.atoms() {
        worst = worst.max((w - b.weight(g)).abs());
    }
    for (g, w) in b.atoms() {
        worst = worst.max((w - a.weight(g)).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use walklab_core::convolution::return_series;
    use walklab_core::measures::uniform_ball;
    use walklab_core::{Group, GroupKind};

    #[test]
    fn keys_separate_every_field() {
        let k = cache_key("power", "lattice:d=1", "ball:r=1", 0.0, 4);
        assert_eq!(k.len(), 64);
        for other in [
            cache_key("series", "lattice:d=1", "ball:r=1", 0.0, 4),
            cache_key("power", "lattice:d=2", "ball:r=1", 0.0, 4),
            cache_key("power", "lattice:d=1", "ball:r=2", 0.0, 4),
            cache_key("power", "lattice:d=1", "ball:r=1", 1e-14, 4),
            cache_key("power", "lattice:d=1", "ball:r=1", 0.0, 5),
        ] {
            assert_ne!(k, other);
        }
    }

    #[test]
    fn cached_powers_match_fresh_ones() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let l = Group::new(GroupKind::Lamplighter { d: 1 }).unwrap();
        let phi = uniform_ball(&l, 1).unwrap();
        for n in [1, 3, 6] {
            let (fresh, hit) = cache.power("lamplighter:d=1", "ball:r=1", &phi, n, 1e-15).unwrap();
            assert!(!hit);
            let (cached, hit) = cache.power("lamplighter:d=1", "ball:r=1", &phi, n, 1e-15).unwrap();
            assert!(hit);
            assert!(max_difference(&fresh, &cached) <= 1e-12);
            assert!((fresh.deficit() - cached.deficit()).abs() <= 1e-12);
        }
    }

    #[test]
    fn powers_agree_with_the_series() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let phi = uniform_ball(&z, 1).unwrap();
        let p = power(&phi, 2, 0.0).unwrap();
        let sq: f64 = p.atoms().iter().map(|a| a.1 * a.1).sum();
        let s = return_series(&phi, 2, 0.0).unwrap();
        assert!((sq - s.get(4).unwrap().lower).abs() < 1e-15);
        assert_eq!(power(&phi, 0, 0.0).unwrap().len(), 1);
    }

    #[test]
    fn series_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let key = cache_key("series", "lattice:d=1", "ball:r=1", 0.0, 8);
        let compute = || return_series(&uniform_ball(&z, 1).unwrap(), 4, 0.0);
        let (a, hit) = cache.series_or(&key, compute).unwrap();
        assert!(!hit);
        let (b, hit) = cache.series_or(&key, || unreachable!()).unwrap();
        assert!(hit && a == b);
        fs::write(cache.path(&key, "json"), "{").unwrap();
        let (c, hit) = cache.series_or(&key, compute).unwrap();
        assert!(!hit && a == c);
    }
}
