//! Append-only JSON-lines cache of computed counts.
//!
//! Each line is one [`CacheEntry`]. Lines written by another engine version
//! are kept on disk but never served. New entries are flushed by rewriting
//! the file through a temporary sibling and an atomic rename.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::enumeration::{CountRecord, Method};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub n: usize,
    pub k: usize,
    pub r: u64,
    pub method: Method,
    pub engine_version: String,
}

impl CacheKey {
    pub fn of(record: &CountRecord) -> Self {
        CacheKey {
            n: record.n,
            k: record.k,
            r: record.r,
            method: record.method,
            engine_version: record.engine_version.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub value: CountRecord,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    lines: Vec<String>,
    index: HashMap<CacheKey, CacheEntry>,
    pending: usize,
}

impl Cache {
    /// A cache that is never persisted.
    pub fn in_memory() -> Self {
        Cache::default()
    }

    /// Loads `path` if it exists; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = Cache {
            path: Some(path.clone()),
            ..Cache::default()
        };
        let file = match fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e),
        };
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CacheEntry = serde_json::from_str(&line).map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: {e}", path.display(), lineno + 1),
                )
            })?;
            cache.index.entry(entry.key.clone()).or_insert(entry);
            cache.lines.push(line);
        }
        Ok(cache)
    }

    pub fn get(
        &self,
        n: usize,
        k: usize,
        r: u64,
        method: Method,
        engine_version: &str,
    ) -> Option<&CacheEntry> {
        let key = CacheKey {
            n,
            k,
            r,
            method,
            engine_version: engine_version.to_string(),
        };
        self.index.get(&key)
    }

    /// Records a new count. Existing keys are immutable; returns false then.
    pub fn insert(&mut self, record: CountRecord) -> bool {
        let key = CacheKey::of(&record);
        if self.index.contains_key(&key) {
            return false;
        }
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let entry = CacheEntry {
            key: key.clone(),
            value: record,
            created_at,
        };
        self.lines
            .push(serde_json::to_string(&entry).expect("cache entries serialize"));
        self.index.insert(key, entry);
        self.pending += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Writes pending entries, if any, replacing the file atomically.
    pub fn flush(&mut self) -> io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if self.pending == 0 {
            return Ok(());
        }
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let mut tmp = path.clone().into_os_string();
        tmp.push(format!(".tmp{}", std::process::id()));
        let tmp = PathBuf::from(tmp);
        {
            fs::create_dir_all(dir)?;
            let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
            for line in &self.lines {
                writeln!(f, "{line}")?;
            }
            f.into_inner()?.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        self.pending = 0;
        Ok(())
    }
}
