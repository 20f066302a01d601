//! Persistent table of `r₃` records.
//!
//! File format (version 1):
//!
//! ```json
//! {"version":1,"records":[{"N":5,"value":4,"witness":[1,2,4,5]}]}
//! ```
//!
//! Loading checks every record for internal consistency (witness inside
//! `[N]`, progression-free, of the stated size). [`R3Cache::verify`]
//! additionally recomputes values by exact search.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::field::IntervalSet;
use crate::{Error, Result};

use super::{is_3ap_free, R3Method, R3Record, R3Solver};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    records: Vec<CacheEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    #[serde(rename = "N")]
    n: usize,
    value: usize,
    witness: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct R3Cache {
    records: BTreeMap<usize, R3Record>,
}

impl R3Cache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&R3Record> {
        self.records.get(&n)
    }

    pub fn records(&self) -> impl Iterator<Item = &R3Record> {
        self.records.values()
    }

    pub fn insert(&mut self, record: R3Record) {
        self.records.insert(record.n, record);
    }

    /// The cached record for `N`, or an exact computation (which is then
    /// remembered) when absent.
    pub fn get_or_compute(&mut self, n: usize, solver: &mut R3Solver) -> Result<R3Record> {
        if let Some(r) = self.records.get(&n) {
            return Ok(r.clone());
        }
        let record = solver.solve(n)?.clone();
        self.insert(record.clone());
        Ok(record)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CacheFile =
            serde_json::from_str(text).map_err(|e| Error::CorruptCache(e.to_string()))?;
        if file.version != CACHE_VERSION {
            return Err(Error::CacheVersion { found: file.version, expected: CACHE_VERSION });
        }
        let mut cache = Self::new();
        for entry in file.records {
            let witness = IntervalSet::from_members(entry.n, entry.witness.iter().copied())
                .map_err(|e| Error::CorruptCache(format!("N = {}: {e}", entry.n)))?;
            if witness.len() != entry.value || entry.witness.len() != entry.value {
                return Err(Error::CorruptCache(format!(
                    "N = {}: witness has {} elements, value is {}",
                    entry.n,
                    witness.len(),
                    entry.value
                )));
            }
            if !is_3ap_free(&witness) {
                return Err(Error::CorruptCache(format!("N = {}: witness has a progression", entry.n)));
            }
            if cache.records.contains_key(&entry.n) {
                return Err(Error::CorruptCache(format!("duplicate record for N = {}", entry.n)));
            }
            cache.insert(R3Record { n: entry.n, value: entry.value, witness, method: R3Method::Cached });
        }
        Ok(cache)
    }

    pub fn to_json(&self) -> String {
        let file = CacheFile {
            version: CACHE_VERSION,
            records: self
                .records
                .values()
                .map(|r| CacheEntry { n: r.n, value: r.value, witness: r.witness.to_vec() })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("cache serialises") + "\n"
    }

    /// A missing file is an empty cache.
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes through a temporary file and renames it into place.
    pub fn store<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Recomputes every record within the solver's limit and fails on the
    /// first disagreement in value. Returns how many records were checked.
    pub fn verify(&self, solver: &mut R3Solver) -> Result<usize> {
        let mut checked = 0;
        let limit = solver.limit();
        for r in self.records.values().filter(|r| r.n <= limit) {
            let computed = solver.value(r.n)?;
            if computed != r.value {
                return Err(Error::CacheMismatch { n: r.n, cached: r.value, computed });
            }
            checked += 1;
        }
        Ok(checked)
    }
}
