//! Append-only result cache: one JSON record per line in `counts.ndjson`.
//!
//! Writers take an exclusive advisory lock on the file for the duration of a
//! single append; readers take a shared lock. Later records win on lookup.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CACHE_FILE: &str = "counts.ndjson";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    /// One of `xprime`, `rank3`, `e2`, `resolved`.
    pub variety: String,
    pub y: [i64; 5],
    pub p: u64,
    pub policy: String,
    pub count: i64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub version: String,
}

impl CacheRecord {
    pub fn new(variety: &str, y: [i64; 5], p: u64, policy: &str, count: i64) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            variety: variety.to_string(),
            y,
            p,
            policy: policy.to_string(),
            count,
            timestamp,
            version: crate::VERSION.to_string(),
        }
    }

    fn same_key(&self, other: &CacheRecord) -> bool {
        self.variety == other.variety
            && self.y == other.y
            && self.p == other.p
            && self.policy == other.policy
            && self.version == other.version
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { path: dir.join(CACHE_FILE) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &CacheRecord) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.lock()?;
        let written = file.write_all(line.as_bytes()).and_then(|_| file.flush());
        file.unlock()?;
        Ok(written?)
    }

    pub fn records(&self) -> Result<Vec<CacheRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        file.lock_shared()?;
        let mut out = Vec::new();
        for (n, line) in BufReader::new(&file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec = serde_json::from_str(&line)
                .map_err(|e| Error::Data { path: self.path.clone(), detail: format!("line {}: {e}", n + 1) })?;
            out.push(rec);
        }
        file.unlock()?;
        Ok(out)
    }

    /// Most recent record for the key, written by this code version.
    pub fn lookup(&self, variety: &str, y: [i64; 5], p: u64, policy: &str) -> Result<Option<CacheRecord>> {
        let probe = CacheRecord::new(variety, y, p, policy, 0);
        Ok(self.records()?.into_iter().rev().find(|r| r.same_key(&probe)))
    }
}
