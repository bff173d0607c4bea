//! On-disk cache of evaluated constants, keyed by term key and digit
//! count. Values are stored as decimal strings with ten extra digits;
//! the stored error bound already covers the storage rounding. A
//! missing, corrupt or version-mismatched file degrades to a cold start.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::bigfloat::{Bf, PrecisionReal};

const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Default)]
struct CacheFile {
    version: u32,
    entries: HashMap<String, CacheEntry>,
}

#[derive(Serialize, Deserialize, Clone)]
struct CacheEntry {
    value: String,
    err: f64,
}

pub struct ConstantCache {
    path: Option<PathBuf>,
    entries: Mutex<HashMap<String, CacheEntry>>,
}

impl ConstantCache {
    pub fn in_memory() -> Self {
        ConstantCache {
            path: None,
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn load(path: &Path) -> Self {
        let entries = fs::read_to_string(path)
            .ok()
            .and_then(|text| serde_json::from_str::<CacheFile>(&text).ok())
            .filter(|f| f.version == CACHE_VERSION)
            .map(|f| f.entries)
            .unwrap_or_default();
        ConstantCache {
            path: Some(path.to_path_buf()),
            entries: Mutex::new(entries),
        }
    }

    fn key(term_key: &str, digits: u32) -> String {
        format!("{term_key}@{digits}")
    }

    pub fn get(&self, term_key: &str, digits: u32, bits: u32) -> Option<PrecisionReal> {
        let entry = self
            .entries
            .lock()
            .unwrap()
            .get(&Self::key(term_key, digits))
            .cloned()?;
        let value = Bf::parse_decimal(&entry.value, bits).ok()?;
        if !entry.err.is_finite() || entry.err < 0.0 {
            return None;
        }
        Some(PrecisionReal::new(value, entry.err))
    }

    pub fn put(&self, term_key: &str, digits: u32, v: &PrecisionReal) {
        let entry = CacheEntry {
            value: v.to_decimal(digits + 10),
            // cover the decimal rounding of the stored value
            err: v.err + 10f64.powi(-(digits as i32) - 10),
        };
        self.entries
            .lock()
            .unwrap()
            .insert(Self::key(term_key, digits), entry);
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Persist to the load path, if any. Creates parent directories.
    pub fn save(&self) -> std::io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let file = CacheFile {
            version: CACHE_VERSION,
            entries: self.entries.lock().unwrap().clone(),
        };
        fs::write(path, serde_json::to_string_pretty(&file)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{eval_term, numeric_equal, EvalConfig};
    use crate::terms::EulerTerm;

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("consts.json");
        let cfg = EvalConfig::new(25);
        let term = EulerTerm::parse("z(3)").unwrap();
        let v = eval_term(&term, &cfg).unwrap();

        let cache = ConstantCache::load(&path);
        assert!(cache.is_empty());
        cache.put("z(3)", 25, &v);
        cache.save().unwrap();

        let reloaded = ConstantCache::load(&path);
        let got = reloaded.get("z(3)", 25, cfg.bits()).unwrap();
        assert!(numeric_equal(&got, &v));
        assert!(got.err <= 1e-25 + 1e-35);
        assert!(reloaded.get("z(3)", 30, cfg.bits()).is_none());
    }

    #[test]
    fn corrupt_file_cold_starts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("consts.json");
        std::fs::write(&path, "{not json").unwrap();
        let cache = ConstantCache::load(&path);
        assert!(cache.is_empty());
        // wrong version is also a cold start
        std::fs::write(&path, r#"{"version": 999, "entries": {}}"#).unwrap();
        assert!(ConstantCache::load(&path).is_empty());
    }
}
