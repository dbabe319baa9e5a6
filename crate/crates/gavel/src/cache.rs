//! Replay cache: line-delimited JSON, one GenerationRecord per line,
//! keyed by request fingerprint. Duplicate fingerprints are identical by
//! construction, so last-write-wins on load.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use gavel_core::record::GenerationRecord;

use crate::error::AppError;

#[derive(Debug, Default)]
pub struct ReplayCache {
    records: BTreeMap<String, GenerationRecord>,
}

impl ReplayCache {
    pub fn empty() -> Self {
        ReplayCache::default()
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let file = File::open(path)
            .map_err(|e| AppError::Config(format!("cannot read cache {}: {e}", path.display())))?;
        let mut records = BTreeMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: GenerationRecord =
                serde_json::from_str(&line).map_err(|e| AppError::MalformedCache {
                    path: path.display().to_string(),
                    line: i + 1,
                    detail: e.to_string(),
                })?;
            records.insert(record.request_fingerprint.clone(), record);
        }
        Ok(ReplayCache { records })
    }

    pub fn get(&self, fingerprint: &str) -> Option<&GenerationRecord> {
        self.records.get(fingerprint)
    }

    pub fn contains(&self, fingerprint: &str) -> bool {
        self.records.contains_key(fingerprint)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Append-only cache writer, safe for concurrent use by backend workers.
pub struct CacheWriter {
    file: Mutex<File>,
}

impl CacheWriter {
    pub fn append(path: &Path) -> Result<Self, AppError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(CacheWriter { file: Mutex::new(file) })
    }

    pub fn write(&self, record: &GenerationRecord) -> Result<(), AppError> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut file = self.file.lock().expect("cache writer lock");
        file.write_all(line.as_bytes())?;
        file.flush()?;
        Ok(())
    }
}
