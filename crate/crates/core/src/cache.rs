//! Append-only JSON-lines cache of N_k values keyed by (fingerprint, k).
//!
//! Each append is one `write_all` on a file opened with O_APPEND, so lines
//! from concurrent writers never interleave. A torn final line (no trailing
//! newline) is ignored on read.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::counting::{count_table, CountOptions, CountRow, CountTable, IdealSpec, Strategy};
use crate::error::{Error, Result};
use crate::TOOL_VERSION;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub fingerprint: String,
    pub q: u32,
    pub e: u32,
    pub n: usize,
    pub k: u32,
    #[serde(rename = "N_k")]
    pub n_k: String,
    pub strategy: Strategy,
    pub tool_version: String,
}

impl CacheRecord {
    fn count(&self) -> Result<u64> {
        self.n_k
            .parse()
            .map_err(|_| Error::Integrity(format!("N_k `{}` is not a decimal integer", self.n_k)))
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    path: PathBuf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u32,
    pub written: u32,
}

impl Cache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Cache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Every complete record, in file order.
    pub fn read_all(&self) -> Result<Vec<CacheRecord>> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let complete = match text.rfind('\n') {
            Some(i) => &text[..=i],
            None => "",
        };
        complete
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l)
                    .map_err(|e| Error::Integrity(format!("line {}: malformed record: {e}", i + 1)))
            })
            .collect()
    }

    /// N_k by k for one fingerprint; duplicates must agree.
    pub fn lookup(&self, fingerprint: &str) -> Result<BTreeMap<u32, u64>> {
        let mut out = BTreeMap::new();
        for r in self.read_all()?.iter().filter(|r| r.fingerprint == fingerprint) {
            let c = r.count()?;
            if let Some(&old) = out.get(&r.k) {
                if old != c {
                    return Err(Error::Integrity(format!(
                        "conflicting N_{} for {}: {old} and {c}",
                        r.k, fingerprint
                    )));
                }
            }
            out.insert(r.k, c);
        }
        Ok(out)
    }

    pub fn append(&self, records: &[CacheRecord]) -> Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(r).expect("records serialize"));
            buf.push('\n');
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.write_all(buf.as_bytes())?;
        Ok(())
    }
}

/// [`count_table`] backed by the cache: reuse stored rows when every level is
/// present, otherwise compute, check against stored rows, and append new ones.
pub fn count_table_cached(
    spec: &IdealSpec,
    k_max: u32,
    opts: &CountOptions,
    cache: &Cache,
) -> Result<(CountTable, CacheStats)> {
    let known = cache.lookup(spec.fingerprint())?;
    if (1..=k_max).all(|k| known.contains_key(&k)) {
        let rows = (1..=k_max).map(|k| CountRow { k, count: known[&k] }).collect();
        let table = CountTable {
            rows,
            q: spec.q(),
            n: spec.n(),
            fingerprint: spec.fingerprint().to_string(),
            strategy: opts.strategy,
        };
        return Ok((table, CacheStats { hits: k_max, written: 0 }));
    }
    let table = count_table(spec, k_max, opts)?;
    let mut fresh = Vec::new();
    let mut hits = 0;
    for r in &table.rows {
        match known.get(&r.k) {
            Some(&c) if c != r.count => {
                return Err(Error::Integrity(format!(
                    "cached N_{} = {c} disagrees with computed {}",
                    r.k, r.count
                )))
            }
            Some(_) => hits += 1,
            None => fresh.push(CacheRecord {
                fingerprint: spec.fingerprint().to_string(),
                q: spec.q(),
                e: spec.ctx().field().e(),
                n: spec.n(),
                k: r.k,
                n_k: r.count.to_string(),
                strategy: opts.strategy,
                tool_version: TOOL_VERSION.to_string(),
            }),
        }
    }
    cache.append(&fresh)?;
    Ok((table, CacheStats { hits, written: fresh.len() as u32 }))
}
